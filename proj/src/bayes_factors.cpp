#include "bfequiv/bayes_factors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/linalg.hpp"
#include "bfequiv/roots.hpp"
#include "bfequiv/special_functions.hpp"

namespace bfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

BfValue from_quadrature(const LogQuadResult& q, const std::string& what) {
  if (!q.converged || !std::isfinite(q.log_value)) {
    std::ostringstream os;
    os.precision(6);
    os << what << ": quadrature did not converge (log value " << q.log_value << ", relative error estimate "
       << q.rel_error << ", " << q.evaluations << " evaluations)";
    fail(ErrorCode::NonConvergence, os.str());
  }
  return {q.log_value, q.rel_error, BfMethod::Quadrature, q.evaluations};
}

BfValue from_series(const SeriesExpansion& s) { return {s.log_value, s.tail_bound, BfMethod::CoshSeries, s.terms}; }

// Series with quadrature fallback, or both routes compared.
BfValue series_or_quadrature(BfMethod method, const std::function<SeriesExpansion()>& series,
                             const std::function<LogQuadResult()>& quadrature, const std::string& what) {
  switch (method) {
    case BfMethod::CoshSeries: {
      const SeriesExpansion s = series();
      if (s.converged) return from_series(s);
      return from_quadrature(quadrature(), what);
    }
    case BfMethod::Quadrature:
      return from_quadrature(quadrature(), what);
    case BfMethod::CrossCheck: {
      const SeriesExpansion s = series();
      const BfValue q = from_quadrature(quadrature(), what);
      if (!s.converged) return q;
      const double diff = std::fabs(std::expm1(s.log_value - q.log_value));
      if (diff > kCrossCheckTolerance) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": series (" << s.log_value << ", " << s.terms << " terms) and quadrature (" << q.log_value
           << ") disagree by relative " << diff;
        fail(ErrorCode::NumericalIntegrity, os.str());
      }
      BfValue out = from_series(s);
      out.method = BfMethod::CrossCheck;
      out.rel_error = std::max(diff, s.tail_bound);
      return out;
    }
    case BfMethod::ClosedForm:
      break;
  }
  fail(ErrorCode::Unsupported, what + ": no closed form for this prior");
}

}  // namespace

const char* to_string(BfMethod method) noexcept {
  switch (method) {
    case BfMethod::ClosedForm: return "closed_form";
    case BfMethod::Quadrature: return "quadrature";
    case BfMethod::CoshSeries: return "cosh_series";
    case BfMethod::CrossCheck: return "cross_check";
  }
  return "unknown";
}

BfValue bf_one_sided(const ExpFamilyModel& model, const Prior& prior, double theta0, double t, int n) {
  const bool above = prior.is_point_mass() ? prior.location() > theta0 : prior.support().lo >= theta0;
  require(above, ErrorCode::ParameterDomain, "one-sided Bayes factor needs a prior on theta > theta0");
  return bf_two_sided(model, prior, theta0, t, n);
}

BfValue bf_two_sided(const ExpFamilyModel& model, const Prior& prior, double theta0, double t, int n) {
  require(n >= 1, ErrorCode::ParameterDomain, "sample size must be positive");
  const Interval dom = model.domain();
  auto log_g = [&](double theta) {
    if (!dom.contains(theta)) return kNegInf;
    return model.log_ratio(t, theta0, theta, n);
  };
  if (prior.is_point_mass()) return {log_g(prior.location()), 0.0, BfMethod::ClosedForm, 1};
  if (prior.kind() == PriorKind::SymmetricPaired && prior.base()->is_point_mass()) {
    BfValue v = from_quadrature(prior.log_expectation(log_g), "exponential-family Bayes factor");
    v.method = BfMethod::ClosedForm;
    return v;
  }
  return from_quadrature(prior.log_expectation(log_g), "exponential-family Bayes factor");
}

BfValue bf_normal_conjugate(double t, int n, double prior_mean, double prior_precision, double theta0) {
  require(prior_precision > 0.0 && n >= 1, ErrorCode::ParameterDomain, "conjugate form needs tau > 0 and n >= 1");
  const double s = t + prior_precision * prior_mean;
  const double k = n + prior_precision;
  const double log_b = 0.5 * std::log(prior_precision / k) + 0.5 * s * s / k -
                       0.5 * prior_precision * prior_mean * prior_mean - t * theta0 + 0.5 * n * theta0 * theta0;
  return {log_b, 0.0, BfMethod::ClosedForm, 0};
}

double section_example_exact(double n_xbar_sq, double n_over_tau) {
  return std::exp(-0.5 * std::log1p(n_over_tau) + 0.5 * n_xbar_sq * n_over_tau / (1.0 + n_over_tau));
}

double section_example_approx(double n_xbar_sq, double n_over_tau) {
  return std::exp(-0.5 * std::log1p(n_over_tau) + 0.5 * n_xbar_sq);
}

BfValue bf_t_test(double mean, double sum_sq, int n, const SphericalDensity& h, BfMethod method) {
  require(n >= 2, ErrorCode::ParameterDomain, "t-test Bayes factor needs n >= 2");
  require(sum_sq > 0.0, ErrorCode::Degenerate, "sum of squares must be positive");
  require(h.dim() == 1, ErrorCode::ParameterDomain, "t-test prior must be one-dimensional");
  const double u = mean * mean / sum_sq;
  require(u <= (1.0 + 1e-12) / n, ErrorCode::Domain, "mean and sum of squares are inconsistent");
  const double z = 2.0 * n * n * std::min(u, 1.0 / n);
  const auto kernel = RadialKernel::shared(h, static_cast<double>(n));
  return series_or_quadrature(
      method, [&] { return kernel->series(z, 0.5 * n); },
      [&] { return kernel->log_gamma_mixture(z, 0.5 * n); }, "t-test Bayes factor");
}

BfValue bf_t_test_from_t(double t_stat, int n, const SphericalDensity& h, BfMethod method) {
  require(n >= 2, ErrorCode::ParameterDomain, "t-test Bayes factor needs n >= 2");
  const double t2 = t_stat * t_stat;
  // u = x̄²/Σx² for any dataset with this t statistic; Σx² = 1 representative
  const double u = std::isinf(t2) ? 1.0 / n : t2 / (n * (n - 1.0 + t2));
  return bf_t_test(std::sqrt(u), 1.0, n, h, method);
}

BfValue bf_regression_known_var(std::span<const double> t_vec, const SphericalDensity& h, BfMethod method) {
  require(static_cast<int>(t_vec.size()) == h.dim(), ErrorCode::Domain, "statistic dimension does not match prior");
  double norm2 = 0.0;
  for (double v : t_vec) norm2 += v * v;
  return bf_regression_known_var_norm(norm2, h, method);
}

BfValue bf_regression_known_var_norm(double t_norm2, const SphericalDensity& h, BfMethod method) {
  require(t_norm2 >= 0.0, ErrorCode::Domain, "|T| must be nonnegative");
  const auto kernel = RadialKernel::shared(h, 1.0);
  return series_or_quadrature(
      method, [&] { return kernel->series(t_norm2); }, [&] { return kernel->log_phi(std::sqrt(t_norm2)); },
      "known-variance regression Bayes factor");
}

BfValue bf_regression_known_var_cartesian(std::span<const double> t_vec, const SphericalDensity& h) {
  const int p = static_cast<int>(t_vec.size());
  require(p == h.dim() && p <= 2, ErrorCode::Unsupported, "Cartesian evaluation supports p <= 2");
  QuadOptions opt;
  opt.rel_tol = 1e-12;
  if (p == 1) {
    const double t = t_vec[0];
    auto f = [&](double d) { return d * t - 0.5 * d * d + h.log_density_sq(d * d); };
    return from_quadrature(log_integrate(f, -kInf, kInf, opt), "Cartesian Bayes factor");
  }
  const double t1 = t_vec[0], t2 = t_vec[1];
  // Integrand <= exp{-½(δ-T)² + ½|T|²} max h, so |δ_j - T_j| > 40 carries no mass.
  constexpr double kReach = 40.0;
  double worst_failed = -kInf;
  auto outer = [&](double d1) {
    auto inner = [&](double d2) { return d1 * t1 + d2 * t2 - 0.5 * (d1 * d1 + d2 * d2) + h.log_density_sq(d1 * d1 + d2 * d2); };
    const LogQuadResult r = log_integrate(inner, t2 - kReach, t2 + kReach, opt);
    if (!r.converged) worst_failed = std::max(worst_failed, r.log_value);
    return r.log_value;
  };
  LogQuadResult r = log_integrate(outer, t1 - kReach, t1 + kReach, opt);
  r.converged = r.converged && !(worst_failed > r.log_value - 40.0);
  return from_quadrature(r, "Cartesian Bayes factor");
}

BfValue bf_regression_known_var_conjugate(double t_norm2, int p, double prior_variance) {
  require(prior_variance > 0.0 && p >= 1, ErrorCode::ParameterDomain, "conjugate form needs v > 0, p >= 1");
  const double v = prior_variance;
  return {-0.5 * p * std::log1p(v) + 0.5 * v / (1.0 + v) * t_norm2, 0.0, BfMethod::ClosedForm, 0};
}

BfValue bf_regression_unknown_var(double y_hat_y, double y_y, int n, int p, const SphericalDensity& h,
                                  BfMethod method) {
  require(n > p && p >= 1, ErrorCode::ParameterDomain, "regression needs n > p >= 1");
  require(y_y > 0.0, ErrorCode::Degenerate, "response has zero sum of squares");
  require(y_hat_y >= -1e-12 * y_y && y_hat_y <= y_y * (1.0 + 1e-12), ErrorCode::Domain,
          "fitted sum of squares outside [0, y'y]");
  require(h.dim() == p, ErrorCode::Domain, "prior dimension does not match the design");
  const double ratio = std::clamp(y_hat_y / y_y, 0.0, 1.0);
  const auto kernel = RadialKernel::shared(h, 1.0);
  return series_or_quadrature(
      method, [&] { return kernel->series(2.0 * ratio, 0.5 * n); },
      [&] { return kernel->log_gamma_mixture(2.0 * ratio, 0.5 * n); }, "unknown-variance regression Bayes factor");
}

double f_from_ratio(double ratio, int n, int p) { return (static_cast<double>(n - p) / p) * ratio / (1.0 - ratio); }

double ratio_from_f(double f, int n, int p) {
  if (std::isinf(f)) return 1.0;
  return p * f / (p * f + (n - p));
}

KnownVarConstants two_sample_known_var_constants(int n1, int n2, double tau1, double tau2, double c) {
  require(n1 >= 1 && n2 >= 1 && tau1 > 0.0 && tau2 > 0.0 && c > 0.0, ErrorCode::ParameterDomain,
          "two-sample constants need positive sizes, precisions and c");
  const double w1 = n1 * tau1, w2 = n2 * tau2;
  return {std::sqrt(c / (1.0 + c)), 0.5 / (1.0 + c) * w1 * w2 / (w1 + w2)};
}

BfValue bf_two_sample_means_known_var(double mean1, double mean2, int n1, int n2, double tau1, double tau2, double c) {
  const KnownVarConstants k = two_sample_known_var_constants(n1, n2, tau1, tau2, c);
  const double d = mean1 - mean2;
  return {std::log(k.kappa) + k.kappa_prime * d * d, 0.0, BfMethod::ClosedForm, 0};
}

TwoSampleTConstants two_sample_t_constants(int n1, int n2, double c) {
  require(n1 >= 2 && n2 >= 2 && c > 0.0, ErrorCode::ParameterDomain, "two-sample t needs n1, n2 >= 2 and c > 0");
  const double n = n1 + n2;
  const double m = static_cast<double>(n1) * n2 / n;
  return {std::sqrt(c / (m + c)), m * m / (m + c), 0.5 * n};
}

namespace {

BfValue two_sample_t_from_tilde(double tilde2, const TwoSampleTConstants& k) {
  const double x = k.kappa_prime * tilde2;
  if (!(x < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "kappa' * T~^2 = " << x << " is not below 1";
    fail(ErrorCode::NumericalIntegrity, os.str());
  }
  return {std::log(k.kappa) - k.exponent * std::log1p(-x), 0.0, BfMethod::ClosedForm, 0};
}

}  // namespace

BfValue bf_two_sample_t(double mean1, double mean2, double ss1, double ss2, int n1, int n2, double c) {
  const TwoSampleTConstants k = two_sample_t_constants(n1, n2, c);
  const double n = n1 + n2;
  const double d = mean2 - mean1;
  const double total = ss1 + ss2 + (static_cast<double>(n1) * n2 / n) * d * d;
  require(total > 0.0, ErrorCode::Degenerate, "pooled sample has zero variance");
  return two_sample_t_from_tilde(d * d / total, k);
}

BfValue bf_two_sample_t_from_stat(double t_stat, int n1, int n2, double c) {
  const TwoSampleTConstants k = two_sample_t_constants(n1, n2, c);
  const double m = static_cast<double>(n1) * n2 / (n1 + n2);
  const double t2 = t_stat * t_stat;
  const double tilde2 = std::isinf(t2) ? 1.0 / m : t2 / (1.0 + t2 * m);
  return two_sample_t_from_tilde(tilde2, k);
}

BfValue bf_variance_ratio(double f, double nu1, double nu2, const Prior& prior) {
  require(f >= 0.0, ErrorCode::Domain, "variance ratio must be nonnegative");
  require(nu1 > 0.0 && nu2 > 0.0, ErrorCode::ParameterDomain, "degrees of freedom must be positive");
  const bool above = prior.is_point_mass() ? prior.location() > 1.0 : prior.support().lo >= 1.0;
  require(above, ErrorCode::ParameterDomain, "variance-ratio prior must live on theta > 1");
  const double half_total = 0.5 * (nu1 + nu2);
  const double log_f1 = std::log1p(f);
  auto log_h = [&](double theta) { return 0.5 * nu2 * std::log(theta) + half_total * (log_f1 - std::log(f + theta)); };
  if (prior.is_point_mass()) return {log_h(prior.location()), 0.0, BfMethod::ClosedForm, 1};
  return from_quadrature(prior.log_expectation(log_h), "variance-ratio Bayes factor");
}

BfValue bf_subset_selection_from_ratio(double t_ratio, int n, int p1, int p2, double c) {
  require(c > 0.0 && p2 >= 1 && n > p1 + p2, ErrorCode::ParameterDomain, "subset selection needs c > 0, n > p1 + p2");
  require(t_ratio >= 0.0 && t_ratio <= 1.0 + 1e-12, ErrorCode::Domain, "T must lie in [0, 1]");
  const double t = std::min(t_ratio, 1.0);
  const double log_b = 0.5 * p2 * std::log(c / (1.0 + c)) - 0.5 * (n - p1) * std::log1p(-t / (1.0 + c));
  return {log_b, 0.0, BfMethod::ClosedForm, 0};
}

BfValue bf_subset_selection(const Eigen::VectorXd& y, const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2, double c) {
  require(y.size() == x1.rows() && y.size() == x2.rows(), ErrorCode::Domain, "design and response sizes differ");
  const Orthonormalized o1 = orthonormalize(x1);
  const Eigen::VectorXd r1 = y - project(o1.z, y);
  const Eigen::MatrixXd xt = x2 - o1.z * (o1.z.transpose() * x2);
  const Orthonormalized ot = orthonormalize(xt);
  const double added = project(ot.z, y).squaredNorm();
  const double base = r1.squaredNorm();
  require(base > 0.0, ErrorCode::Degenerate, "response lies in the span of the reduced design");
  return bf_subset_selection_from_ratio(added / base, static_cast<int>(y.size()), static_cast<int>(x1.cols()),
                                        static_cast<int>(x2.cols()), c);
}

double bf_subjective_variance(double q, double t) {
  require(q >= 0.0, ErrorCode::Domain, "Q must be nonnegative");
  require(t <= 0.25 + 1e-15, ErrorCode::Domain, "T cannot exceed 1/4");
  const double a = q + 0.5;
  const double disc = a * a - t;
  if (!(disc > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "(Q+1/2)^2 - T = " << disc << " is not positive";
    fail(ErrorCode::Domain, os.str());
  }
  return a / std::sqrt(disc);
}

double log_bf_subjective_full(double q, double t, double a, int n) {
  return (a + 0.5 * n) * std::log(bf_subjective_variance(q, t));
}

JohnsonThreshold johnson_umpbt_threshold(const ExpFamilyModel& model, double lambda, int n, double theta0) {
  require(lambda > 0.0 && n >= 1, ErrorCode::ParameterDomain, "Johnson threshold needs lambda > 0 and n >= 1");
  JohnsonThreshold out;
  const double log_lambda = std::log(lambda);
  if (!(log_lambda > 0.0)) {
    out.theta_star = theta0;
    out.boundary = true;
    out.objective = -kInf;
    return out;
  }
  const double b0 = model.b(theta0);
  auto objective = [&](double theta) { return (log_lambda + n * (model.b(theta) - b0)) / (theta - theta0); };
  // g'(θ) (θ-θ0)² = n b'(θ)(θ-θ0) - n(b(θ)-b(θ0)) - log λ, increasing in θ
  auto foc = [&](double theta) {
    return n * model.b_prime(theta) * (theta - theta0) - n * (model.b(theta) - b0) - log_lambda;
  };
  const double hi_bound = model.domain().hi;
  double hi = std::isinf(hi_bound) ? theta0 + 1.0 : theta0 + 0.5 * (hi_bound - theta0);
  int k = 0;
  while (foc(hi) < 0.0) {
    if (++k > 200) {
      out.theta_star = hi;
      out.boundary = true;
      out.objective = objective(hi);
      return out;
    }
    hi = std::isinf(hi_bound) ? theta0 + 2.0 * (hi - theta0) : hi + 0.5 * (hi_bound - hi);
  }
  const RootResult root = solve_bracketed(foc, theta0, hi, 1e-15);
  out.theta_star = root.x;
  out.objective = objective(root.x);
  const double d = root.x - theta0;
  out.first_order_residual = foc(root.x) / (d * d);
  return out;
}

}  // namespace bfe
