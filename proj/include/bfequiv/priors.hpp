#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfequiv/exp_family.hpp"
#include "bfequiv/quadrature.hpp"
#include "bfequiv/rng.hpp"

namespace bfe {

enum class PriorKind { PointMass, Density, NormalMeanPrec, HalfLine, SymmetricPaired };

const char* to_string(PriorKind kind) noexcept;

// Probability measure on the tested parameter. Immutable after construction.
class Prior {
 public:
  static Prior point_mass(double location);
  // Density known up to a constant; normalised by quadrature at construction.
  static Prior density(std::function<double(double)> log_density, Interval support, std::string label);
  static Prior normal(double mean, double precision);
  // Restriction of a continuous prior to (theta0, +inf), renormalised.
  static Prior half_line(const Prior& base, double theta0);
  // Mass on θ > θ0 halved and mirrored through the pairing map.
  static Prior symmetric_paired(const Prior& base, std::shared_ptr<const PairingMap> pairing);

  // Convenience constructors for common half-line bases.
  static Prior half_normal(double theta0, double sd);
  static Prior half_student_t(double theta0, double scale, double df);
  static Prior shifted_exponential(double theta0, double rate);

  PriorKind kind() const noexcept { return kind_; }
  const Interval& support() const noexcept { return support_; }
  const std::string& describe() const noexcept { return label_; }
  bool is_point_mass() const noexcept { return kind_ == PriorKind::PointMass; }
  double location() const noexcept { return location_; }
  const PairingMap* pairing() const noexcept { return pairing_.get(); }
  const Prior* base() const noexcept { return base_.get(); }

  // Normalised log density; -inf outside the support. Point masses return 0 at
  // the atom and -inf elsewhere.
  double logpdf(double theta) const;
  double sample(RngStream& rng) const;
  double mean() const;
  // Total mass by quadrature (1 for point masses).
  double total_mass() const;

  // log ∫ exp(log_f(θ)) π(dθ)
  LogQuadResult log_expectation(const std::function<double(double)>& log_f,
                                const QuadOptions& opt = {}) const;

 private:
  enum class DirectSampler { None, HalfNormal, HalfT, ShiftedExponential };

  void build_sampler();

  PriorKind kind_ = PriorKind::PointMass;
  Interval support_{};
  std::string label_;
  double location_ = 0.0;
  double precision_ = 1.0;
  double log_norm_ = 0.0;
  std::function<double(double)> log_kernel_;
  std::shared_ptr<const Prior> base_;
  std::shared_ptr<const PairingMap> pairing_;
  DirectSampler direct_ = DirectSampler::None;
  double direct_scale_ = 1.0;
  double direct_df_ = 0.0;
  // inverse-CDF table for densities without a direct sampler
  std::shared_ptr<const std::vector<std::pair<double, double>>> cdf_table_;
};

enum class NuisanceKind { DiffusePrecision, DiffuseHalfPrecision, FlatLocation, GammaPrec, NormalLocation };

// Prior on a nuisance parameter. Diffuse kinds are symbolic: they are only
// consumed by closed-form ratios in which their normalisation cancels.
struct NuisancePrior {
  NuisanceKind kind = NuisanceKind::DiffusePrecision;
  double a = 0.0;  // GammaPrec shape, NormalLocation mean
  double b = 0.0;  // GammaPrec rate, NormalLocation precision scale c

  static NuisancePrior diffuse_precision() { return {NuisanceKind::DiffusePrecision, 0, 0}; }
  static NuisancePrior diffuse_half_precision() { return {NuisanceKind::DiffuseHalfPrecision, 0, 0}; }
  static NuisancePrior flat_location() { return {NuisanceKind::FlatLocation, 0, 0}; }
  static NuisancePrior gamma_precision(double shape, double rate);
  static NuisancePrior normal_location(double mean, double c);

  bool is_proper() const noexcept {
    return kind == NuisanceKind::GammaPrec || kind == NuisanceKind::NormalLocation;
  }
  std::string describe() const;
};

enum class SphericalKind { Normal, StudentT, Moment, Custom };

// Density h on R^p depending on its argument only through the squared norm,
// parametrised by h(x) = f(|x|²). For p = 1 this is a symmetric density on the
// line, used as the scaled prior h(θ√φ)√φ.
class SphericalDensity {
 public:
  static SphericalDensity normal(int dim, double scale);
  static SphericalDensity student_t(int dim, double scale, double df);
  // Normal moment prior ∝ |x|² exp(-|x|²/(2 s²)).
  static SphericalDensity moment(int dim, double scale);
  // Arbitrary symmetric density on the line, given unnormalised; p = 1 only.
  static SphericalDensity custom_1d(std::function<double(double)> log_density, std::string label);

  SphericalKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  double scale() const noexcept { return scale_; }
  double df() const noexcept { return df_; }
  const std::string& describe() const noexcept { return label_; }

  // log of the normalised density at a point with squared norm r2.
  double log_density_sq(double r2) const;
  double log_density(std::span<const double> x) const;
  std::vector<double> sample(RngStream& rng) const;

  // Another dimension with the same radial profile family and scale.
  SphericalDensity with_dim(int dim) const;

 private:
  SphericalKind kind_ = SphericalKind::Normal;
  int dim_ = 1;
  double scale_ = 1.0;
  double df_ = 0.0;
  double log_norm_ = 0.0;
  std::string label_;
  std::function<double(double)> custom_;
  std::shared_ptr<const Prior> custom_sampler_;
};

}  // namespace bfe
