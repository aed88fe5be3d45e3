#include "bfequiv/radial_series.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bfequiv/error.hpp"
#include "bfequiv/special_functions.hpp"

namespace bfe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log I_nu(x) for x > 0, switching to the large-argument expansion before overflow.
double log_bessel_i(double nu, double x) {
  if (x < 400.0) return std::log(std::cyl_bessel_i(nu, x));
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

}  // namespace

double log_sphere_average(int p, double x) {
  x = std::fabs(x);
  if (x < 1e-8) return std::log1p(x * x / (2.0 * p));
  if (p == 1) return special::log_two_cosh(x) - std::numbers::ln2;
  if (p == 3) return x + std::log(-std::expm1(-2.0 * x)) - std::log(2.0 * x);
  const double nu = 0.5 * p - 1.0;
  return special::log_gamma(0.5 * p) - nu * std::log(0.5 * x) + log_bessel_i(nu, x);
}

RadialKernel::RadialKernel(const SphericalDensity& h, double weight)
    : h_(h), dim_(h.dim()), weight_(weight) {
  require(weight > 0.0, ErrorCode::ParameterDomain, "radial kernel weight must be positive");
  const double half_p = 0.5 * dim_;
  log_surface_ = std::log(2.0) + half_p * std::log(std::numbers::pi) - special::log_gamma(half_p);
  log_coef_.resize(kMaxTerms + 1);
  for (int j = 0; j <= kMaxTerms; ++j) {
    double log_moment;
    if (h_.kind() == SphericalKind::Normal || h_.kind() == SphericalKind::Moment) {
      // Gaussian radial integrals in closed form
      const double s2 = h_.scale() * h_.scale();
      const double k = weight_ + 1.0 / s2;
      const double extra = h_.kind() == SphericalKind::Moment ? 1.0 : 0.0;
      const double norm = -half_p * std::log(2.0 * std::numbers::pi * s2) -
                          (h_.kind() == SphericalKind::Moment ? std::log(dim_ * s2) : 0.0);
      const double e = j + extra + half_p;
      log_moment = norm + log_surface_ - std::numbers::ln2 + e * std::log(2.0 / k) + special::log_gamma(e);
    } else {
      const double power = 2.0 * j + dim_ - 1.0;
      auto integrand = [&](double r) {
        if (!(r > 0.0)) return kNegInf;
        return power * std::log(r) - 0.5 * weight_ * r * r + h_.log_density_sq(r * r);
      };
      QuadOptions opt;
      opt.rel_tol = 1e-13;
      const LogQuadResult q = log_integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), opt);
      require(std::isfinite(q.log_value), ErrorCode::NumericalIntegrity, "radial moment integral failed");
      log_moment = log_surface_ + q.log_value;
    }
    log_coef_[static_cast<std::size_t>(j)] = log_moment + special::log_gamma(half_p) - j * std::log(4.0) -
                                             special::log_gamma(j + 1.0) - special::log_gamma(half_p + j);
  }
}

std::shared_ptr<const RadialKernel> RadialKernel::shared(const SphericalDensity& h, double weight) {
  using Key = std::tuple<std::string, int, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const RadialKernel>> cache;
  Key key{h.describe() + "#" + std::to_string(static_cast<int>(h.kind())), h.dim(), weight};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto kernel = std::make_shared<const RadialKernel>(h, weight);
  // custom densities are identified by label only; keep them out of the cache
  if (h.kind() != SphericalKind::Custom) cache.emplace(key, kernel);
  return kernel;
}

SeriesExpansion RadialKernel::series(double x, double shape, double rel_tol) const {
  require(x >= 0.0, ErrorCode::Domain, "series argument must be nonnegative");
  SeriesExpansion out;
  if (x == 0.0) {
    out.log_value = log_coef_[0];
    out.terms = 1;
    out.converged = true;
    return out;
  }
  const double log_x = std::log(x);
  const double log_gamma_shape = shape > 0.0 ? special::log_gamma(shape) : 0.0;
  auto log_term = [&](int j) {
    double v = log_coef_[static_cast<std::size_t>(j)] + j * log_x;
    if (shape > 0.0) v += special::log_gamma(shape + j) - log_gamma_shape;
    return v;
  };
  // running sum held as exp(acc_log) with rescaling on growth
  double acc_log = log_term(0);
  double sum = 1.0;
  double prev = acc_log;
  for (int j = 1; j <= kMaxTerms; ++j) {
    const double lt = log_term(j);
    if (lt > acc_log) {
      sum = sum * std::exp(acc_log - lt) + 1.0;
      acc_log = lt;
    } else {
      sum += std::exp(lt - acc_log);
    }
    const double log_ratio = lt - prev;
    prev = lt;
    if (log_ratio < 0.0) {
      const double ratio = std::exp(log_ratio);
      const double tail = std::exp(lt - acc_log) * ratio / (1.0 - ratio) / sum;
      if (tail < rel_tol) {
        out.log_value = acc_log + std::log(sum);
        out.terms = j + 1;
        out.tail_bound = tail;
        out.converged = true;
        return out;
      }
    }
  }
  out.log_value = acc_log + std::log(sum);
  out.terms = kMaxTerms + 1;
  out.tail_bound = std::numeric_limits<double>::infinity();
  out.converged = false;
  return out;
}

LogQuadResult RadialKernel::log_phi(double a, const QuadOptions& opt) const {
  const int p = dim_;
  auto integrand = [&](double r) {
    if (!(r > 0.0)) return kNegInf;
    return log_surface_ + (p - 1.0) * std::log(r) + log_sphere_average(p, a * r) - 0.5 * weight_ * r * r +
           h_.log_density_sq(r * r);
  };
  return log_integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), opt);
}

LogQuadResult RadialKernel::log_gamma_mixture(double c, double shape, const QuadOptions& opt) const {
  require(c >= 0.0 && shape > 0.0, ErrorCode::Domain, "gamma mixture needs c >= 0 and shape > 0");
  const double lg = special::log_gamma(shape);
  // log_phi(a) <= a²/(2w), so the integrand is dominated by a Gamma(shape, rho)
  // kernel; log_phi(0) bounds the integral from below. Beyond v_max the
  // remaining mass is below e^-40 of the total.
  const double rho = 1.0 - c / (2.0 * weight_);
  require(rho > 0.0, ErrorCode::Domain, "gamma mixture diverges for c >= 2w");
  const double floor = log_phi(0.0, opt).log_value;
  double v_max = 2.0 * shape / rho + 10.0;
  for (int k = 0; k < 200; ++k) {
    const double q = special::gamma_q(shape, rho * v_max);
    if (q <= 0.0 || -shape * std::log(rho) + std::log(q) < floor - 40.0) break;
    v_max *= 1.5;
  }
  double worst_failed = kNegInf;
  auto integrand = [&](double v) {
    if (!(v > 0.0)) return kNegInf;
    const LogQuadResult inner = log_phi(std::sqrt(c * v), opt);
    const double value = (shape - 1.0) * std::log(v) - v - lg + inner.log_value;
    if (!inner.converged) worst_failed = std::max(worst_failed, value);
    return value;
  };
  LogQuadResult r = log_integrate(integrand, 0.0, v_max, opt);
  // an unconverged inner integral only matters where the outer integrand carries mass
  r.converged = r.converged && !(worst_failed > r.log_value - 40.0);
  return r;
}

}  // namespace bfe
