#include "bfequiv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/special_functions.hpp"

namespace bfe {

namespace {

using special::log_gamma;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Remaining Poisson weight at which mixture series stop; terms are bounded by 1.
constexpr double kMixtureTail = 1e-14;

struct PoissonMixture {
  double mu;
  std::size_t mode;
  double mode_weight;
};

PoissonMixture poisson_mixture(double ncp) {
  const double mu = 0.5 * ncp;
  const auto mode = static_cast<std::size_t>(std::floor(mu));
  const double k = static_cast<double>(mode);
  const double w = std::exp(-mu + (k > 0 ? k * std::log(mu) : 0.0) - log_gamma(k + 1.0));
  return {mu, mode, w};
}

// Sums weight_j * term(j) from the Poisson mode outward in both directions.
template <class Term>
double mixture_sum(double ncp, Term term) {
  const PoissonMixture pm = poisson_mixture(ncp);
  double used = 0.0;
  double sum = 0.0;
  double w = pm.mode_weight;
  std::size_t j = pm.mode;
  for (;; ++j) {
    sum += w * term(j);
    used += w;
    if (1.0 - used < kMixtureTail || w == 0.0) break;
    w *= pm.mu / static_cast<double>(j + 1);
    if (j > pm.mode + 100000) fail(ErrorCode::NonConvergence, "noncentral series too long");
  }
  w = pm.mode_weight;
  for (j = pm.mode; j > 0 && 1.0 - used >= kMixtureTail;) {
    w *= static_cast<double>(j) / pm.mu;
    --j;
    sum += w * term(j);
    used += w;
  }
  return sum;
}

double chi_square_pdf(double df, double x) {
  if (x < 0.0) return 0.0;
  const double k = 0.5 * df;
  if (x == 0.0) {
    if (k < 1.0) return kInf;
    return k == 1.0 ? 0.5 : 0.0;
  }
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - log_gamma(k));
}

double fisher_pdf(double d1, double d2, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (d1 < 2.0) return kInf;
    return d1 == 2.0 ? 1.0 : 0.0;
  }
  const double a = 0.5 * d1;
  const double b = 0.5 * d2;
  const double log_value = a * std::log(d1 / d2) + (a - 1.0) * std::log(x) -
                           (a + b) * std::log1p(d1 * x / d2) -
                           (log_gamma(a) + log_gamma(b) - log_gamma(a + b));
  return std::exp(log_value);
}

// Unscaled evaluation (scale == 1).
double base_pdf(const DistSpec& d, double x) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::Normal: {
      const double z = (x - p[0]) / p[1];
      return std::exp(-0.5 * z * z) / (p[1] * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::Gamma:
      if (x < 0.0) return 0.0;
      if (x == 0.0) return p[0] < 1.0 ? kInf : (p[0] == 1.0 ? p[1] : 0.0);
      return std::exp(p[0] * std::log(p[1]) + (p[0] - 1.0) * std::log(x) - p[1] * x -
                      log_gamma(p[0]));
    case Family::ChiSquare:
      return chi_square_pdf(p[0], x);
    case Family::StudentT: {
      const double nu = p[0];
      return std::exp(log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
                      0.5 * std::log(nu * std::numbers::pi) -
                      0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    }
    case Family::FisherF:
      return fisher_pdf(p[0], p[1], x);
    case Family::NoncentralChiSquare:
      if (x < 0.0) return 0.0;
      return mixture_sum(p[1], [&](std::size_t j) { return chi_square_pdf(p[0] + 2.0 * j, x); });
    case Family::NoncentralF:
      if (x < 0.0) return 0.0;
      return mixture_sum(p[2], [&](std::size_t j) {
        const double r = p[0] / (p[0] + 2.0 * j);
        return r * fisher_pdf(p[0] + 2.0 * j, p[1], x * r);
      });
  }
  return 0.0;
}

// Lower tail when upper is false, upper tail otherwise.
double base_tail(const DistSpec& d, double x, bool upper) {
  const auto& p = d.params;
  auto choose = [upper](double lower_value, double upper_value) {
    return upper ? upper_value : lower_value;
  };
  switch (d.family) {
    case Family::Normal: {
      const double z = (x - p[0]) / p[1];
      return upper ? special::normal_sf(z) : special::normal_cdf(z);
    }
    case Family::Gamma:
      if (x <= 0.0) return choose(0.0, 1.0);
      return upper ? special::gamma_q(p[0], p[1] * x) : special::gamma_p(p[0], p[1] * x);
    case Family::ChiSquare:
      if (x <= 0.0) return choose(0.0, 1.0);
      return upper ? special::gamma_q(0.5 * p[0], 0.5 * x) : special::gamma_p(0.5 * p[0], 0.5 * x);
    case Family::StudentT: {
      const double nu = p[0];
      if (std::isinf(x)) return (x > 0) == upper ? 0.0 : 1.0;
      const double tail = 0.5 * special::beta_inc(0.5 * nu, 0.5, nu / (nu + x * x));
      const bool want_small = (x > 0.0) == upper;
      return want_small ? tail : 1.0 - tail;
    }
    case Family::FisherF: {
      if (x <= 0.0) return choose(0.0, 1.0);
      if (std::isinf(x)) return choose(1.0, 0.0);
      const double y = p[0] * x / (p[0] * x + p[1]);
      return upper ? special::beta_inc_complement(0.5 * p[0], 0.5 * p[1], y)
                   : special::beta_inc(0.5 * p[0], 0.5 * p[1], y);
    }
    case Family::NoncentralChiSquare:
      if (x <= 0.0) return choose(0.0, 1.0);
      if (std::isinf(x)) return choose(1.0, 0.0);
      return mixture_sum(p[1], [&](std::size_t j) {
        const double a = 0.5 * p[0] + static_cast<double>(j);
        return upper ? special::gamma_q(a, 0.5 * x) : special::gamma_p(a, 0.5 * x);
      });
    case Family::NoncentralF: {
      if (x <= 0.0) return choose(0.0, 1.0);
      if (std::isinf(x)) return choose(1.0, 0.0);
      const double y = p[0] * x / (p[0] * x + p[1]);
      return mixture_sum(p[2], [&](std::size_t j) {
        const double a = 0.5 * p[0] + static_cast<double>(j);
        return upper ? special::beta_inc_complement(a, 0.5 * p[1], y)
                     : special::beta_inc(a, 0.5 * p[1], y);
      });
    }
  }
  return 0.0;
}

double base_mean(const DistSpec& d) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::Normal: return p[0];
    case Family::Gamma: return p[0] / p[1];
    case Family::ChiSquare: return p[0];
    case Family::StudentT: return 0.0;
    case Family::FisherF: return p[1] > 2.0 ? p[1] / (p[1] - 2.0) : 1.0;
    case Family::NoncentralChiSquare: return p[0] + p[1];
    case Family::NoncentralF:
      return p[1] > 2.0 ? p[1] * (p[0] + p[2]) / (p[0] * (p[1] - 2.0)) : 1.0 + p[2] / p[0];
  }
  return 0.0;
}

double base_sd_guess(const DistSpec& d) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::Normal: return p[1];
    case Family::Gamma: return std::sqrt(p[0]) / p[1];
    case Family::ChiSquare: return std::sqrt(2.0 * p[0]);
    case Family::StudentT: return p[0] > 2.0 ? std::sqrt(p[0] / (p[0] - 2.0)) : 2.0;
    case Family::FisherF:
    case Family::NoncentralF: return std::max(1.0, base_mean(d));
    case Family::NoncentralChiSquare: return std::sqrt(2.0 * (p[0] + 2.0 * p[1]));
  }
  return 1.0;
}

bool positive_support(Family f) { return f != Family::Normal && f != Family::StudentT; }

double base_sample(const DistSpec& d, RngStream& rng) {
  const auto& p = d.params;
  switch (d.family) {
    case Family::Normal: return p[0] + p[1] * rng.normal();
    case Family::Gamma: return rng.gamma(p[0]) / p[1];
    case Family::ChiSquare: return rng.chi_square(p[0]);
    case Family::StudentT: return rng.normal() / std::sqrt(rng.chi_square(p[0]) / p[0]);
    case Family::FisherF: return (rng.chi_square(p[0]) / p[0]) / (rng.chi_square(p[1]) / p[1]);
    case Family::NoncentralChiSquare: {
      if (p[0] >= 1.0) {
        const double z = rng.normal() + std::sqrt(p[1]);
        return z * z + (p[0] > 1.0 ? rng.chi_square(p[0] - 1.0) : 0.0);
      }
      const auto j = rng.poisson(0.5 * p[1]);
      return rng.chi_square(p[0] + 2.0 * static_cast<double>(j));
    }
    case Family::NoncentralF: {
      const DistSpec num = DistSpec::noncentral_chi_square(p[0], p[2]);
      return (base_sample(num, rng) / p[0]) / (rng.chi_square(p[1]) / p[1]);
    }
  }
  return 0.0;
}

}  // namespace

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::Normal: return "Normal";
    case Family::Gamma: return "Gamma";
    case Family::ChiSquare: return "ChiSquare";
    case Family::StudentT: return "StudentT";
    case Family::FisherF: return "FisherF";
    case Family::NoncentralF: return "NoncentralF";
    case Family::NoncentralChiSquare: return "NoncentralChiSquare";
  }
  return "?";
}

DistSpec DistSpec::normal(double mean, double sd) {
  DistSpec d{Family::Normal, {mean, sd, 0.0}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::gamma(double shape, double rate) {
  DistSpec d{Family::Gamma, {shape, rate, 0.0}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::chi_square(double df) {
  DistSpec d{Family::ChiSquare, {df, 0.0, 0.0}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::student_t(double df) {
  DistSpec d{Family::StudentT, {df, 0.0, 0.0}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::fisher_f(double df1, double df2) {
  DistSpec d{Family::FisherF, {df1, df2, 0.0}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::noncentral_f(double df1, double df2, double ncp) {
  DistSpec d{Family::NoncentralF, {df1, df2, ncp}, 1.0};
  d.validate();
  return d;
}
DistSpec DistSpec::noncentral_chi_square(double df, double ncp) {
  DistSpec d{Family::NoncentralChiSquare, {df, ncp, 0.0}, 1.0};
  d.validate();
  return d;
}

DistSpec DistSpec::scaled(double factor) const {
  DistSpec d = *this;
  d.scale *= factor;
  d.validate();
  return d;
}

void DistSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(scale), ErrorCode::ParameterDomain, "scale must be positive");
  bool ok = true;
  switch (family) {
    case Family::Normal: ok = std::isfinite(params[0]) && positive(params[1]); break;
    case Family::Gamma: ok = positive(params[0]) && positive(params[1]); break;
    case Family::ChiSquare:
    case Family::StudentT: ok = positive(params[0]); break;
    case Family::FisherF: ok = positive(params[0]) && positive(params[1]); break;
    case Family::NoncentralF:
      ok = positive(params[0]) && positive(params[1]) && std::isfinite(params[2]) &&
           params[2] >= 0.0;
      break;
    case Family::NoncentralChiSquare:
      ok = positive(params[0]) && std::isfinite(params[1]) && params[1] >= 0.0;
      break;
  }
  if (!ok) fail(ErrorCode::ParameterDomain, "invalid parameters for " + describe());
}

std::string DistSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << to_string(family) << "(";
  const int count = family == Family::ChiSquare || family == Family::StudentT ? 1
                    : (family == Family::NoncentralF)                         ? 3
                                                                              : 2;
  for (int i = 0; i < count; ++i) os << (i ? "," : "") << params[i];
  os << ")";
  if (scale != 1.0) os << "*" << scale;
  return os.str();
}

double DistSpec::support_lower() const { return positive_support(family) ? 0.0 : -kInf; }

double pdf(const DistSpec& d, double x) {
  d.validate();
  return base_pdf(d, x / d.scale) / d.scale;
}

double cdf(const DistSpec& d, double x) {
  d.validate();
  if (std::isnan(x)) fail(ErrorCode::Domain, "cdf at NaN");
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return base_tail(d, x / d.scale, false);
}

double sf(const DistSpec& d, double x) {
  d.validate();
  if (std::isnan(x)) fail(ErrorCode::Domain, "sf at NaN");
  if (x == kInf) return 0.0;
  if (x == -kInf) return 1.0;
  return base_tail(d, x / d.scale, true);
}

double mean(const DistSpec& d) { return d.scale * base_mean(d); }

double quantile(const DistSpec& d, double p) {
  d.validate();
  require(p > 0.0 && p < 1.0, ErrorCode::Domain, "quantile needs p in (0,1)");
  DistSpec unit = d;
  unit.scale = 1.0;
  if (d.family == Family::Normal) {
    return d.scale * (d.params[0] + d.params[1] * special::normal_quantile(p));
  }
  // Root of target(x) = 0, posed on whichever tail keeps p resolvable.
  const bool use_upper = p > 0.5;
  const double q = use_upper ? 1.0 - p : p;
  auto residual = [&](double x) {
    return use_upper ? q - base_tail(unit, x, true) : base_tail(unit, x, false) - q;
  };
  // Cornish-Fisher-style first guess: mean + z * sd, clipped to the support.
  const double z = special::normal_quantile(p);
  const bool positive = positive_support(d.family);
  double guess = base_mean(unit) + z * base_sd_guess(unit);
  if (positive && guess <= 0.0) guess = 0.5 * base_mean(unit) * std::exp(z);
  if (positive && !(guess > 0.0)) guess = 1.0;

  double lo = guess, hi = guess;
  double step = std::max(1.0, std::fabs(guess)) * 0.25;
  int expansions = 0;
  while (residual(lo) > 0.0) {
    lo = positive ? lo * 0.5 : lo - step;
    step *= 2.0;
    if (++expansions > 2000) fail(ErrorCode::NoSolution, "quantile bracket (lower) not found");
  }
  step = std::max(1.0, std::fabs(guess)) * 0.25;
  while (residual(hi) < 0.0) {
    hi = positive ? hi * 2.0 + step : hi + step;
    step *= 2.0;
    if (++expansions > 4000) fail(ErrorCode::NoSolution, "quantile bracket (upper) not found");
  }
  // Safeguarded Newton: take the Newton step when it stays inside the bracket,
  // bisect otherwise.
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double r = residual(x);
    if (r == 0.0) return d.scale * x;
    if (r > 0.0) hi = x; else lo = x;
    const double density = base_pdf(unit, x);
    double next = (density > 0.0 && std::isfinite(density)) ? x - r / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x)) ||
        hi - lo <= 1e-15 * std::max(1.0, std::fabs(x))) {
      return d.scale * next;
    }
    x = next;
  }
  return d.scale * x;
}

double sample_one(const DistSpec& d, RngStream& rng) {
  return d.scale * base_sample(d, rng);
}

std::vector<double> sample(const DistSpec& d, RngStream& rng, std::size_t k) {
  d.validate();
  require(k >= 1, ErrorCode::Domain, "sample count must be at least 1");
  std::vector<double> out(k);
  for (auto& v : out) v = sample_one(d, rng);
  return out;
}

}  // namespace bfe
