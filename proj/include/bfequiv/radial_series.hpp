#pragma once

#include <memory>
#include <vector>

#include "bfequiv/priors.hpp"
#include "bfequiv/quadrature.hpp"

namespace bfe {

// log of the average of exp(x u'e) over unit vectors u in R^p.
double log_sphere_average(int p, double x);

struct SeriesExpansion {
  double log_value = 0.0;
  int terms = 0;           // truncation index J
  double tail_bound = 0.0;  // bound on the neglected tail relative to the sum
  bool converged = false;
};

// For a spherical density h on R^p and Gaussian weight w, the radial kernel
//   Φ(a) = ∫ exp(a u'x - w|x|²/2) h(x) dx  (any unit u)
// and its even power series Φ(a) = Σ c_j a^{2j}, with
//   c_j = M_{2j} Γ(p/2) / (4^j j! Γ(p/2 + j)),  M_{2j} = ∫ |x|^{2j} e^{-w|x|²/2} h(x) dx.
// Coefficients are nonnegative and computed once per instance.
class RadialKernel {
 public:
  static constexpr int kMaxTerms = 500;

  RadialKernel(const SphericalDensity& h, double weight);
  // Process-wide cache keyed by (density descriptor, dimension, weight).
  static std::shared_ptr<const RadialKernel> shared(const SphericalDensity& h, double weight);

  int dim() const noexcept { return dim_; }
  double weight() const noexcept { return weight_; }
  const SphericalDensity& density() const noexcept { return h_; }
  double log_coefficient(int j) const { return log_coef_.at(static_cast<std::size_t>(j)); }
  const std::vector<double>& log_coefficients() const noexcept { return log_coef_; }

  // Σ_j c_j [Γ(shape + j)/Γ(shape)] x^j for x ≥ 0; shape = 0 drops the gamma ratio.
  SeriesExpansion series(double x, double shape = 0.0, double rel_tol = 1e-13) const;
  // log Φ(a) by quadrature over the radius.
  LogQuadResult log_phi(double a, const QuadOptions& opt = {}) const;
  // log E[Φ(sqrt(c v))] with v ~ Gamma(shape, 1), by nested quadrature.
  LogQuadResult log_gamma_mixture(double c, double shape, const QuadOptions& opt = {}) const;

 private:
  SphericalDensity h_;
  int dim_;
  double weight_;
  double log_surface_;
  std::vector<double> log_coef_;
};

}  // namespace bfe
