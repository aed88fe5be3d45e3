#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bfequiv/distributions.hpp"
#include "bfequiv/rng.hpp"

namespace bfe {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return x > lo && x < hi; }
};

enum class ExpFamilyKind {
  NormalUnitVariance,  // N(θ, 1), d(x) = x, b(θ) = θ²/2
  ExponentialRate,     // density -θ e^{θx}, θ < 0, d(x) = x, b(θ) = -log(-θ)
  Polynomial,          // user-supplied b(θ) = Σ c_k θ^k, no sampler
};

// One-parameter exponential family with density a(x) exp{θ d(x) - b(θ)}.
// The base measure a cancels from every ratio and is never represented.
class ExpFamilyModel {
 public:
  static ExpFamilyModel normal_unit_variance();
  static ExpFamilyModel exponential_rate();
  static ExpFamilyModel polynomial(std::vector<double> coefficients, Interval domain);

  ExpFamilyKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const Interval& domain() const noexcept { return domain_; }

  double b(double theta) const;
  double b_prime(double theta) const;
  double d(double x) const { return x; }

  // log g(t, from, to) = t (to - from) - n [b(to) - b(from)]
  double log_ratio(double t, double from, double to, double n) const {
    return t * (to - from) - n * (b(to) - b(from));
  }

  // Exact law of T = Σ d(X_i) for n observations at θ, when one is known.
  std::optional<DistSpec> statistic_law(double theta, int n) const;
  bool has_sampler() const noexcept { return kind_ != ExpFamilyKind::Polynomial; }
  std::vector<double> sample(double theta, int n, RngStream& rng) const;

  // Second differences of b and monotonicity of g in t on a grid spanning the domain.
  bool check_regularity(int grid_points = 200) const;

  bool operator==(const ExpFamilyModel& other) const {
    return kind_ == other.kind_ && coefficients_ == other.coefficients_ &&
           domain_.lo == other.domain_.lo && domain_.hi == other.domain_.hi;
  }

 private:
  ExpFamilyKind kind_ = ExpFamilyKind::NormalUnitVariance;
  std::string name_;
  Interval domain_;
  std::vector<double> coefficients_;
};

// Pairing map θ ↦ r(θ) < θ0 solving h(γ1, θ, r) = h(γ2, θ, r) where
// h(t, θ, r) = g(t, θ0, θ) + g(t, θ0, r). The two sides are unimodal in the
// distance from θ0, so the order-reversing branch is taken: θ up to the
// maximiser of the θ-side pairs with r between the maximiser of the r-side and θ0.
class PairingMap {
 public:
  PairingMap(ExpFamilyModel model, double theta0, double n, double gamma1, double gamma2);

  double theta0() const noexcept { return theta0_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }
  double n() const noexcept { return n_; }
  const ExpFamilyModel& model() const noexcept { return model_; }

  double operator()(double theta) const;
  // θ > θ0 with r(θ) = x, or nullopt when x is not in the range of r.
  std::optional<double> inverse(double x) const;
  // dr/dθ by implicit differentiation.
  double derivative(double theta) const;

  // log of each side of the defining equation (θ-side for θ > θ0, r-side for r < θ0).
  double upper_side(double theta) const;
  double lower_side(double r) const;
  // h(γ1, θ, r) - h(γ2, θ, r) in relative terms
  double residual(double theta, double r) const;
  // True when the model is Gaussian and the region is symmetric about nθ0.
  bool is_reflection() const noexcept { return reflection_; }
  // Maximiser of the θ-side; r jumps across the lower-side peak here unless both
  // sides share the same maximum.
  double upper_peak() const noexcept { return upper_peak_; }

 private:
  double upper_side_slope(double theta) const;
  double lower_side_slope(double r) const;

  ExpFamilyModel model_;
  double theta0_;
  double n_;
  double gamma1_;
  double gamma2_;
  double upper_peak_ = 0.0;  // maximiser of upper_side over θ > θ0
  double lower_peak_ = 0.0;  // maximiser of lower_side over r < θ0
  double upper_max_ = 0.0;
  double lower_max_ = 0.0;
  bool reflection_ = false;
};

// Solves the pairing equation for a single θ > θ0.
double solve_pairing(const ExpFamilyModel& model, double theta0, double n, double gamma1,
                     double gamma2, double theta);

}  // namespace bfe
