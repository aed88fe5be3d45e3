#include "bfequiv/exp_family.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/roots.hpp"

namespace bfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Point at "distance" u > 0 from origin towards bound (finite or infinite).
double toward(double origin, double bound, double u) {
  if (std::isinf(bound)) return bound > origin ? origin + u : origin - u;
  return origin + (bound - origin) * (u / (1.0 + u));
}

// log(e^{hi * d} - e^{lo * d}) for hi > lo, d > 0
double log_exp_diff(double hi, double lo, double d) { return hi * d + std::log(-std::expm1((lo - hi) * d)); }

}  // namespace

ExpFamilyModel ExpFamilyModel::normal_unit_variance() {
  ExpFamilyModel m;
  m.kind_ = ExpFamilyKind::NormalUnitVariance;
  m.name_ = "normal";
  m.domain_ = {-kInf, kInf};
  return m;
}

ExpFamilyModel ExpFamilyModel::exponential_rate() {
  ExpFamilyModel m;
  m.kind_ = ExpFamilyKind::ExponentialRate;
  m.name_ = "exponential";
  m.domain_ = {-kInf, 0.0};
  return m;
}

ExpFamilyModel ExpFamilyModel::polynomial(std::vector<double> coefficients, Interval domain) {
  require(!coefficients.empty(), ErrorCode::ParameterDomain, "polynomial log-partition needs coefficients");
  require(domain.lo < domain.hi, ErrorCode::ParameterDomain, "empty parameter domain");
  ExpFamilyModel m;
  m.kind_ = ExpFamilyKind::Polynomial;
  m.name_ = "polynomial";
  m.domain_ = domain;
  m.coefficients_ = std::move(coefficients);
  require(m.check_regularity(), ErrorCode::ParameterDomain,
          "log-partition is not convex on the declared domain");
  return m;
}

double ExpFamilyModel::b(double theta) const {
  switch (kind_) {
    case ExpFamilyKind::NormalUnitVariance:
      return 0.5 * theta * theta;
    case ExpFamilyKind::ExponentialRate:
      return theta < 0.0 ? -std::log(-theta) : kInf;
    case ExpFamilyKind::Polynomial: {
      double acc = 0.0;
      for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * theta + *it;
      return acc;
    }
  }
  return kInf;
}

double ExpFamilyModel::b_prime(double theta) const {
  switch (kind_) {
    case ExpFamilyKind::NormalUnitVariance:
      return theta;
    case ExpFamilyKind::ExponentialRate:
      return -1.0 / theta;
    case ExpFamilyKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = coefficients_.size() - 1; k >= 1; --k) acc = acc * theta + k * coefficients_[k];
      return acc;
    }
  }
  return kInf;
}

std::optional<DistSpec> ExpFamilyModel::statistic_law(double theta, int n) const {
  require(domain_.contains(theta), ErrorCode::Domain, "parameter outside the model domain");
  switch (kind_) {
    case ExpFamilyKind::NormalUnitVariance:
      return DistSpec::normal(n * theta, std::sqrt(static_cast<double>(n)));
    case ExpFamilyKind::ExponentialRate:
      return DistSpec::gamma(n, -theta);
    case ExpFamilyKind::Polynomial:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<double> ExpFamilyModel::sample(double theta, int n, RngStream& rng) const {
  require(domain_.contains(theta), ErrorCode::Domain, "parameter outside the model domain");
  std::vector<double> x(static_cast<std::size_t>(n));
  switch (kind_) {
    case ExpFamilyKind::NormalUnitVariance:
      for (auto& v : x) v = theta + rng.normal();
      return x;
    case ExpFamilyKind::ExponentialRate:
      for (auto& v : x) v = -std::log(rng.uniform()) / (-theta);
      return x;
    case ExpFamilyKind::Polynomial:
      break;
  }
  fail(ErrorCode::Unsupported, "no sampler for a model given only by its log-partition");
}

bool ExpFamilyModel::check_regularity(int grid_points) const {
  const double lo = std::isinf(domain_.lo) ? -20.0 : domain_.lo;
  const double hi = std::isinf(domain_.hi) ? 20.0 : domain_.hi;
  const double h = (hi - lo) / (grid_points + 1);
  for (int i = 1; i < grid_points; ++i) {
    const double x = lo + i * h;
    if (!(x - h > domain_.lo && x + h < domain_.hi)) continue;
    const double second = b(x + h) - 2.0 * b(x) + b(x - h);
    if (!std::isfinite(second) || second < -1e-9 * std::max(1.0, std::fabs(b(x)))) return false;
    // g(t, x, x + h) must increase with t
    if (!(log_ratio(1.0, x, x + h, 1.0) > log_ratio(0.0, x, x + h, 1.0))) return false;
  }
  return true;
}

PairingMap::PairingMap(ExpFamilyModel model, double theta0, double n, double gamma1, double gamma2)
    : model_(std::move(model)), theta0_(theta0), n_(n), gamma1_(std::min(gamma1, gamma2)),
      gamma2_(std::max(gamma1, gamma2)) {
  require(model_.domain().contains(theta0_), ErrorCode::ParameterDomain, "theta0 outside the model domain");
  require(gamma1_ < gamma2_, ErrorCode::ParameterDomain, "pairing needs gamma1 < gamma2");
  require(n_ > 0.0, ErrorCode::ParameterDomain, "pairing needs n > 0");
  reflection_ = model_.kind() == ExpFamilyKind::NormalUnitVariance &&
                std::fabs((gamma1_ + gamma2_) - 2.0 * n_ * theta0_) <=
                    1e-13 * std::max(1.0, std::fabs(gamma2_ - gamma1_));

  const double scale = 1e-3 * std::max(1.0, std::fabs(theta0_));
  auto locate_peak = [&](double bound, auto slope) {
    // slope is +inf next to θ0 and the side is strictly concave
    double near = toward(theta0_, bound, scale * 1e-6);
    double u = scale;
    double far = toward(theta0_, bound, u);
    int k = 0;
    while (slope(far) > 0.0) {
      near = far;
      u *= 2.0;
      far = toward(theta0_, bound, u);
      if (++k > 200 || far == bound) return far;  // side increasing up to the boundary
    }
    auto f = [&](double x) { return slope(x); };
    return solve_bracketed(f, std::min(near, far), std::max(near, far), 1e-14).x;
  };
  upper_peak_ = locate_peak(model_.domain().hi, [&](double x) { return upper_side_slope(x); });
  lower_peak_ = locate_peak(model_.domain().lo, [&](double x) { return -lower_side_slope(x); });
  upper_max_ = upper_side(upper_peak_);
  lower_max_ = lower_side(lower_peak_);
}

double PairingMap::upper_side(double theta) const {
  const double d = theta - theta0_;
  if (!(d > 0.0)) return -kInf;
  return -n_ * (model_.b(theta) - model_.b(theta0_)) + log_exp_diff(gamma2_, gamma1_, d);
}

double PairingMap::lower_side(double r) const {
  const double d = theta0_ - r;
  if (!(d > 0.0)) return -kInf;
  return -n_ * (model_.b(r) - model_.b(theta0_)) + log_exp_diff(-gamma1_, -gamma2_, d);
}

double PairingMap::upper_side_slope(double theta) const {
  const double d = theta - theta0_;
  const double q = std::exp((gamma1_ - gamma2_) * d);
  return -n_ * model_.b_prime(theta) + (gamma2_ - gamma1_ * q) / (-std::expm1((gamma1_ - gamma2_) * d));
}

double PairingMap::lower_side_slope(double r) const {
  const double d = theta0_ - r;
  const double q = std::exp((gamma1_ - gamma2_) * d);
  return -n_ * model_.b_prime(r) + (gamma1_ - gamma2_ * q) / (-std::expm1((gamma1_ - gamma2_) * d));
}

namespace {

// Safeguarded Newton on a bracket [lo, hi] with f(lo), f(hi) of opposite signs.
double newton_bisect(const std::function<double(double)>& f, const std::function<double(double)>& df,
                     double lo, double hi) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = x - fx / slope;
    if (!(next > std::min(lo, hi) && next < std::max(lo, hi)) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    const double tol = 1e-15 * std::max(1.0, std::fabs(x));
    if (std::fabs(next - x) <= tol || std::fabs(hi - lo) <= tol) return next;
    x = next;
  }
  return x;
}

}  // namespace

double PairingMap::operator()(double theta) const {
  require(theta > theta0_ && model_.domain().contains(theta), ErrorCode::Domain,
          "pairing is defined for theta > theta0 inside the model domain");
  if (reflection_) return 2.0 * theta0_ - theta;
  const double target = upper_side(theta);
  if (target > lower_max_) {
    std::ostringstream os;
    os.precision(12);
    os << "pairing equation has no root for theta=" << theta << ": upper side " << target
       << " exceeds the maximum " << lower_max_ << " of the lower side at r=" << lower_peak_;
    fail(ErrorCode::NoSolution, os.str());
  }
  auto f = [&](double r) { return lower_side(r) - target; };
  auto df = [&](double r) { return lower_side_slope(r); };
  if (theta <= upper_peak_) return newton_bisect(f, df, lower_peak_, theta0_);
  const double scale = std::max(1.0, theta0_ - lower_peak_);
  double u = scale;
  double cap = toward(lower_peak_, model_.domain().lo, u);
  int doublings = 0;
  while (f(cap) > 0.0) {
    if (++doublings > 60) {
      std::ostringstream os;
      os.precision(12);
      os << "no sign change for the pairing of theta=" << theta << " within bracket [" << cap << ", "
         << lower_peak_ << "] after 60 doublings";
      fail(ErrorCode::NoSolution, os.str());
    }
    u *= 2.0;
    cap = toward(lower_peak_, model_.domain().lo, u);
  }
  return newton_bisect(f, df, cap, lower_peak_);
}

std::optional<double> PairingMap::inverse(double x) const {
  if (!(x < theta0_) || !model_.domain().contains(x)) return std::nullopt;
  if (reflection_) return 2.0 * theta0_ - x;
  const double target = lower_side(x);
  if (target > upper_max_) return std::nullopt;
  auto f = [&](double th) { return upper_side(th) - target; };
  auto df = [&](double th) { return upper_side_slope(th); };
  // lower-side values above the θ-side peak are never hit; the near branch
  // on the r-side corresponds to θ up to the peak
  if (x >= lower_peak_) return newton_bisect(f, df, theta0_, upper_peak_);
  const double scale = std::max(1.0, upper_peak_ - theta0_);
  double u = scale;
  double cap = toward(upper_peak_, model_.domain().hi, u);
  for (int k = 0; f(cap) > 0.0; ++k) {
    if (k > 60) return std::nullopt;
    u *= 2.0;
    cap = toward(upper_peak_, model_.domain().hi, u);
  }
  return newton_bisect(f, df, upper_peak_, cap);
}

double PairingMap::derivative(double theta) const {
  if (reflection_) return -1.0;
  const double r = (*this)(theta);
  return upper_side_slope(theta) / lower_side_slope(r);
}

double PairingMap::residual(double theta, double r) const {
  const double up = upper_side(theta);
  const double low = lower_side(r);
  return std::exp(up) * std::expm1(low - up);
}

double solve_pairing(const ExpFamilyModel& model, double theta0, double n, double gamma1, double gamma2,
                     double theta) {
  return PairingMap(model, theta0, n, gamma1, gamma2)(theta);
}

}  // namespace bfe
