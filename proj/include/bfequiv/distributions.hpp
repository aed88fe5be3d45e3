#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bfequiv/rng.hpp"

namespace bfe {

enum class Family {
  Normal,
  Gamma,
  ChiSquare,
  StudentT,
  FisherF,
  NoncentralF,
  NoncentralChiSquare,
};

const char* to_string(Family family) noexcept;

// A member of one of the supported families, optionally multiplied by a
// positive scale factor (X = scale * Y). Parameters by family:
//   Normal(mean, sd), Gamma(shape, rate), ChiSquare(df), StudentT(df),
//   FisherF(df1, df2), NoncentralF(df1, df2, ncp), NoncentralChiSquare(df, ncp).
struct DistSpec {
  Family family = Family::Normal;
  std::array<double, 3> params{0.0, 1.0, 0.0};
  double scale = 1.0;

  static DistSpec normal(double mean, double sd);
  static DistSpec gamma(double shape, double rate);
  static DistSpec chi_square(double df);
  static DistSpec student_t(double df);
  static DistSpec fisher_f(double df1, double df2);
  static DistSpec noncentral_f(double df1, double df2, double ncp);
  static DistSpec noncentral_chi_square(double df, double ncp);

  DistSpec scaled(double factor) const;
  void validate() const;
  std::string describe() const;
  double support_lower() const;
};

double pdf(const DistSpec& d, double x);
double cdf(const DistSpec& d, double x);
// Upper tail P(X > x), computed without cancellation.
double sf(const DistSpec& d, double x);
double quantile(const DistSpec& d, double p);
std::vector<double> sample(const DistSpec& d, RngStream& rng, std::size_t k);
double sample_one(const DistSpec& d, RngStream& rng);
double mean(const DistSpec& d);

}  // namespace bfe
