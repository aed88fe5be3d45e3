#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

#include "bfequiv/exp_family.hpp"
#include "bfequiv/priors.hpp"
#include "bfequiv/radial_series.hpp"

namespace bfe {

enum class BfMethod { ClosedForm, Quadrature, CoshSeries, CrossCheck };

const char* to_string(BfMethod method) noexcept;

// A Bayes factor on the log scale with its evaluation diagnostics.
struct BfValue {
  double log_value = 0.0;
  double rel_error = 0.0;  // quadrature error estimate or series tail bound
  BfMethod method = BfMethod::ClosedForm;
  int terms = 0;            // series truncation index or quadrature evaluations
  double value() const { return std::exp(log_value); }
};

// Default cross-check tolerance between series and quadrature routes.
inline constexpr double kCrossCheckTolerance = 1e-6;

// ∫ g(t, θ0, θ) π(dθ) for an exponential-family model with T = Σ d(X_i).
// The one-sided form requires π to live on θ > θ0; the two-sided form accepts
// any prior (members of the paired class give B(γ1) = B(γ2)).
BfValue bf_one_sided(const ExpFamilyModel& model, const Prior& prior, double theta0, double t, int n);
BfValue bf_two_sided(const ExpFamilyModel& model, const Prior& prior, double theta0, double t, int n);

// Normal model, unit variance, prior N(mean, 1/precision), T = Σ x_i.
BfValue bf_normal_conjugate(double t, int n, double prior_mean, double prior_precision, double theta0 = 0.0);

// B(n, τ) = sqrt(τ/(τ+n)) exp{½ n² x̄² /(n+τ)} written in terms of n x̄² and n/τ,
// and the approximation with n/(n+τ) replaced by 1 in the exponent.
double section_example_exact(double n_xbar_sq, double n_over_tau);
double section_example_approx(double n_xbar_sq, double n_over_tau);

// One-sample test of a zero mean with unknown precision φ: prior θ | φ with
// density h(θ√φ)√φ and π(φ) ∝ 1/φ. Depends on the data through
// u = x̄²/Σx² only.
BfValue bf_t_test(double mean, double sum_sq, int n, const SphericalDensity& h,
                  BfMethod method = BfMethod::CoshSeries);
// Same functional parametrised by the t statistic.
BfValue bf_t_test_from_t(double t_stat, int n, const SphericalDensity& h, BfMethod method = BfMethod::CoshSeries);

// Regression with known unit variance after orthonormalisation: B(T) with
// T = Z'y and a spherical prior h on δ.
BfValue bf_regression_known_var(std::span<const double> t_vec, const SphericalDensity& h,
                                BfMethod method = BfMethod::CoshSeries);
BfValue bf_regression_known_var_norm(double t_norm2, const SphericalDensity& h,
                                     BfMethod method = BfMethod::CoshSeries);
// Direct integration over δ in Cartesian coordinates, p ≤ 2 only.
BfValue bf_regression_known_var_cartesian(std::span<const double> t_vec, const SphericalDensity& h);
// Gaussian prior N(0, v I): (1+v)^{-p/2} exp{½ v/(1+v) |T|}.
BfValue bf_regression_known_var_conjugate(double t_norm2, int p, double prior_variance);

// Regression with unknown precision, prior h(δ√φ)φ^{p/2}, π(φ) ∝ 1/φ;
// depends on y through R = y'Hy / y'y.
BfValue bf_regression_unknown_var(double y_hat_y, double y_y, int n, int p, const SphericalDensity& h,
                                  BfMethod method = BfMethod::CoshSeries);
double f_from_ratio(double ratio, int n, int p);
double ratio_from_f(double f, int n, int p);

// Two normal samples with known precisions τ1, τ2: B = κ exp{κ' (x̄1 - x̄2)²}.
struct KnownVarConstants {
  double kappa = 0.0;
  double kappa_prime = 0.0;
};
KnownVarConstants two_sample_known_var_constants(int n1, int n2, double tau1, double tau2, double c);
BfValue bf_two_sample_means_known_var(double mean1, double mean2, int n1, int n2, double tau1, double tau2, double c);

// Two normal samples, common unknown variance: B = κ (1 - κ' T̃²)^{-n/2}
// with T̃² = (x̄2 - x̄1)² / SS and SS the total sum of squares.
struct TwoSampleTConstants {
  double kappa = 0.0;
  double kappa_prime = 0.0;
  double exponent = 0.0;  // n/2
};
TwoSampleTConstants two_sample_t_constants(int n1, int n2, double c);
BfValue bf_two_sample_t(double mean1, double mean2, double ss1, double ss2, int n1, int n2, double c);
// Parametrised by T = (x̄2 - x̄1) / sqrt(SSW), SSW the pooled within-sample sum of squares.
BfValue bf_two_sample_t_from_stat(double t_stat, int n1, int n2, double c);

// Variance ratio test: F = SS1/SS2 with ν1, ν2 degrees of freedom, prior on
// θ = σ1²/σ2² > 1:  B = ∫ θ^{ν2/2} ((F+1)/(F+θ))^{(ν1+ν2)/2} π(dθ).
BfValue bf_variance_ratio(double f, double nu1, double nu2, const Prior& prior);

// Nested regression, g-prior with scale c on the added coefficients:
// B = (c/(1+c))^{p2/2} (1 - T/(1+c))^{-(n-p1)/2}, T = y'Py / y'(I-H1)y.
BfValue bf_subset_selection_from_ratio(double t_ratio, int n, int p1, int p2, double c);
BfValue bf_subset_selection(const Eigen::VectorXd& y, const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                            double c);

// Subjective variance-equality statistic B*(Q, T) = (Q+½)/sqrt((Q+½)² - T).
double bf_subjective_variance(double q, double t);
// Full subjective Bayes factor up to its data-free constant: B*^{a + n/2}.
double log_bf_subjective_full(double q, double t, double a, int n);

// θ* minimising [log λ + n(b(θ) - b(θ0))]/(θ - θ0) over θ > θ0.
struct JohnsonThreshold {
  double theta_star = 0.0;
  double objective = 0.0;
  double first_order_residual = 0.0;
  bool boundary = false;  // no interior minimum (λ ≤ 1 or minimiser on the domain edge)
};
JohnsonThreshold johnson_umpbt_threshold(const ExpFamilyModel& model, double lambda, int n, double theta0);

}  // namespace bfe
