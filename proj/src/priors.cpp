#include "bfequiv/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/special_functions.hpp"

namespace bfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogHalf = -std::numbers::ln2;

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

double checked_log_mass(const std::function<double(double)>& log_density, const Interval& support) {
  QuadOptions opt;
  opt.rel_tol = 1e-12;
  const LogQuadResult r = log_integrate(log_density, support.lo, support.hi, opt);
  require(r.converged && std::isfinite(r.log_value), ErrorCode::ParameterDomain,
          "prior density is not integrable on its support");
  return r.log_value;
}

}  // namespace

const char* to_string(PriorKind kind) noexcept {
  switch (kind) {
    case PriorKind::PointMass: return "point_mass";
    case PriorKind::Density: return "density";
    case PriorKind::NormalMeanPrec: return "normal";
    case PriorKind::HalfLine: return "half_line";
    case PriorKind::SymmetricPaired: return "symmetric_paired";
  }
  return "unknown";
}

Prior Prior::point_mass(double location) {
  require(std::isfinite(location), ErrorCode::ParameterDomain, "point mass location must be finite");
  Prior p;
  p.kind_ = PriorKind::PointMass;
  p.location_ = location;
  p.support_ = {location, location};
  p.label_ = "point_mass(" + fmt_num(location) + ")";
  return p;
}

Prior Prior::density(std::function<double(double)> log_density, Interval support, std::string label) {
  require(support.lo < support.hi, ErrorCode::ParameterDomain, "prior support is empty");
  Prior p;
  p.kind_ = PriorKind::Density;
  p.support_ = support;
  p.label_ = std::move(label);
  p.log_kernel_ = std::move(log_density);
  p.log_norm_ = -checked_log_mass(p.log_kernel_, support);
  const double mass = p.total_mass();
  if (std::fabs(mass - 1.0) > 1e-8) {
    fail(ErrorCode::ParameterDomain, "prior " + p.label_ + " fails the normalisation check: mass " + fmt_num(mass));
  }
  p.build_sampler();
  return p;
}

Prior Prior::normal(double mean, double precision) {
  require(std::isfinite(mean), ErrorCode::ParameterDomain, "normal prior mean must be finite");
  require(precision > 0.0 && std::isfinite(precision), ErrorCode::ParameterDomain,
          "normal prior precision must be positive");
  Prior p;
  p.kind_ = PriorKind::NormalMeanPrec;
  p.location_ = mean;
  p.precision_ = precision;
  p.support_ = {kNegInf, kInf};
  p.log_norm_ = 0.5 * std::log(precision / (2.0 * std::numbers::pi));
  p.label_ = "normal(mean=" + fmt_num(mean) + ",precision=" + fmt_num(precision) + ")";
  return p;
}

Prior Prior::half_line(const Prior& base, double theta0) {
  require(base.kind_ != PriorKind::PointMass && base.kind_ != PriorKind::SymmetricPaired, ErrorCode::ParameterDomain,
          "half-line restriction needs a continuous base");
  Prior p;
  p.kind_ = PriorKind::HalfLine;
  p.support_ = {std::max(theta0, base.support_.lo), base.support_.hi};
  require(p.support_.lo < p.support_.hi, ErrorCode::ParameterDomain, "base prior has no mass above theta0");
  p.base_ = std::make_shared<const Prior>(base);
  p.location_ = theta0;
  auto base_ptr = p.base_;
  p.log_kernel_ = [base_ptr](double x) { return base_ptr->logpdf(x); };
  p.log_norm_ = -checked_log_mass(p.log_kernel_, p.support_);
  p.label_ = "half_line(" + base.label_ + ",theta0=" + fmt_num(theta0) + ")";
  const double mass = p.total_mass();
  require(std::fabs(mass - 1.0) <= 1e-8, ErrorCode::ParameterDomain,
          "half-line prior fails the normalisation check: mass " + fmt_num(mass));
  p.build_sampler();
  return p;
}

Prior Prior::half_normal(double theta0, double sd) {
  require(sd > 0.0, ErrorCode::ParameterDomain, "half-normal scale must be positive");
  Prior p;
  p.kind_ = PriorKind::HalfLine;
  p.support_ = {theta0, kInf};
  p.location_ = theta0;
  p.precision_ = 1.0 / (sd * sd);
  p.base_ = std::make_shared<const Prior>(normal(theta0, 1.0 / (sd * sd)));
  p.log_norm_ = std::numbers::ln2 + p.base_->log_norm_;
  const double prec = p.precision_;
  p.log_kernel_ = [theta0, prec](double x) { return -0.5 * prec * (x - theta0) * (x - theta0); };
  p.label_ = "half_normal(theta0=" + fmt_num(theta0) + ",sd=" + fmt_num(sd) + ")";
  p.direct_ = DirectSampler::HalfNormal;
  p.direct_scale_ = sd;
  return p;
}

Prior Prior::half_student_t(double theta0, double scale, double df) {
  require(scale > 0.0 && df > 0.0, ErrorCode::ParameterDomain, "half-t needs positive scale and df");
  const double c = special::log_gamma(0.5 * (df + 1.0)) - special::log_gamma(0.5 * df) -
                   0.5 * std::log(df * std::numbers::pi) - std::log(scale) + std::numbers::ln2;
  Prior p;
  p.kind_ = PriorKind::HalfLine;
  p.support_ = {theta0, kInf};
  p.location_ = theta0;
  p.log_kernel_ = [=](double x) {
    const double z = (x - theta0) / scale;
    return c - 0.5 * (df + 1.0) * std::log1p(z * z / df);
  };
  p.log_norm_ = 0.0;
  p.label_ = "half_t(theta0=" + fmt_num(theta0) + ",scale=" + fmt_num(scale) + ",df=" + fmt_num(df) + ")";
  p.direct_ = DirectSampler::HalfT;
  p.direct_scale_ = scale;
  p.direct_df_ = df;
  return p;
}

Prior Prior::shifted_exponential(double theta0, double rate) {
  require(rate > 0.0, ErrorCode::ParameterDomain, "exponential prior rate must be positive");
  Prior p;
  p.kind_ = PriorKind::HalfLine;
  p.support_ = {theta0, kInf};
  p.location_ = theta0;
  p.log_kernel_ = [=](double x) { return std::log(rate) - rate * (x - theta0); };
  p.log_norm_ = 0.0;
  p.label_ = "exponential(theta0=" + fmt_num(theta0) + ",rate=" + fmt_num(rate) + ")";
  p.direct_ = DirectSampler::ShiftedExponential;
  p.direct_scale_ = 1.0 / rate;
  return p;
}

Prior Prior::symmetric_paired(const Prior& base, std::shared_ptr<const PairingMap> pairing) {
  require(pairing != nullptr, ErrorCode::ParameterDomain, "symmetric prior needs a pairing map");
  const double theta0 = pairing->theta0();
  if (base.kind_ == PriorKind::PointMass) {
    require(base.location_ > theta0, ErrorCode::ParameterDomain, "base atom must lie above theta0");
    require(pairing->model().domain().contains(base.location_), ErrorCode::ParameterDomain,
            "base atom lies outside the model's parameter space");
  } else {
    require(base.support_.hi <= pairing->model().domain().hi, ErrorCode::ParameterDomain,
            "base prior support extends beyond the model's parameter space");
    require(base.support_.lo >= theta0, ErrorCode::ParameterDomain,
            "base prior must be supported on theta > theta0");
    const double mass = base.total_mass();
    require(std::fabs(mass - 1.0) <= 1e-8, ErrorCode::ParameterDomain,
            "base prior is improper or unnormalised: mass " + fmt_num(mass));
  }
  Prior p;
  p.kind_ = PriorKind::SymmetricPaired;
  p.base_ = std::make_shared<const Prior>(base);
  p.pairing_ = std::move(pairing);
  p.location_ = theta0;
  p.support_ = {p.pairing_->model().domain().lo, base.support_.hi};
  p.label_ = "symmetric_paired(" + base.label_ + ")";
  return p;
}

double Prior::logpdf(double theta) const {
  switch (kind_) {
    case PriorKind::PointMass:
      return theta == location_ ? 0.0 : kNegInf;
    case PriorKind::NormalMeanPrec: {
      const double z = theta - location_;
      return log_norm_ - 0.5 * precision_ * z * z;
    }
    case PriorKind::Density:
    case PriorKind::HalfLine:
      if (!(theta >= support_.lo && theta <= support_.hi)) return kNegInf;
      if (kind_ == PriorKind::HalfLine && theta == support_.lo) return kNegInf;
      return log_norm_ + log_kernel_(theta);
    case PriorKind::SymmetricPaired: {
      const double theta0 = pairing_->theta0();
      if (theta > theta0) return kLogHalf + base_->logpdf(theta);
      const auto pre = pairing_->inverse(theta);
      if (!pre) return kNegInf;
      const double jac = std::fabs(pairing_->derivative(*pre));
      return kLogHalf + base_->logpdf(*pre) - std::log(jac);
    }
  }
  return kNegInf;
}

double Prior::sample(RngStream& rng) const {
  switch (kind_) {
    case PriorKind::PointMass:
      return location_;
    case PriorKind::NormalMeanPrec:
      return location_ + rng.normal() / std::sqrt(precision_);
    case PriorKind::SymmetricPaired: {
      const double theta = base_->sample(rng);
      return rng.uniform() < 0.5 ? theta : (*pairing_)(theta);
    }
    case PriorKind::Density:
    case PriorKind::HalfLine:
      break;
  }
  switch (direct_) {
    case DirectSampler::HalfNormal:
      return location_ + direct_scale_ * std::fabs(rng.normal());
    case DirectSampler::HalfT: {
      const double z = rng.normal() / std::sqrt(rng.chi_square(direct_df_) / direct_df_);
      return location_ + direct_scale_ * std::fabs(z);
    }
    case DirectSampler::ShiftedExponential:
      return location_ - direct_scale_ * std::log(rng.uniform());
    case DirectSampler::None:
      break;
  }
  // inverse-CDF table with linear interpolation inside each cell
  const auto& table = *cdf_table_;
  const double u = rng.uniform();
  auto it = std::lower_bound(table.begin(), table.end(), u,
                             [](const std::pair<double, double>& e, double v) { return e.second < v; });
  if (it == table.begin()) return table.front().first;
  if (it == table.end()) return table.back().first;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = hi.second > lo.second ? (u - lo.second) / (hi.second - lo.second) : 0.5;
  return lo.first + w * (hi.first - lo.first);
}

void Prior::build_sampler() {
  if (direct_ != DirectSampler::None) return;
  // Anchor and scale for the x = anchor ± s u/(1-u) map from the located mode.
  const bool lo_inf = std::isinf(support_.lo), hi_inf = std::isinf(support_.hi);
  std::vector<double> probes;
  const double anchor = !lo_inf ? support_.lo : (!hi_inf ? support_.hi : 0.0);
  for (int k = -30; k <= 30; ++k) {
    const double d = std::ldexp(1.0, k);
    probes.push_back(anchor + d);
    probes.push_back(anchor - d);
  }
  double mode = anchor, best = kNegInf;
  for (double x : probes) {
    if (!(x > support_.lo && x < support_.hi)) continue;
    const double v = logpdf(x);
    if (v > best) {
      best = v;
      mode = x;
    }
  }
  const double s = std::max({std::fabs(mode - anchor), 1e-6, std::exp(-best)});
  const int cells = 4096;
  auto to_x = [&](double u) -> double {
    if (!lo_inf && !hi_inf) return support_.lo + (support_.hi - support_.lo) * u;
    if (!lo_inf) return support_.lo + s * u / (1.0 - u);
    if (!hi_inf) return support_.hi - s * (1.0 - u) / u;
    const double v = 2.0 * u - 1.0;
    return anchor + s * v / (1.0 - std::fabs(v));
  };
  auto table = std::make_shared<std::vector<std::pair<double, double>>>();
  table->reserve(cells + 1);
  double acc = 0.0;
  double prev = to_x(lo_inf && !hi_inf ? 1e-300 : 0.0);
  if (!std::isfinite(prev)) prev = lo_inf ? -1e300 : prev;
  table->push_back({!lo_inf ? support_.lo : prev, 0.0});
  auto dens = [&](double x) { return std::exp(logpdf(x)); };
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  for (int i = 1; i <= cells; ++i) {
    double x = i == cells ? (hi_inf ? kInf : support_.hi) : to_x(static_cast<double>(i) / cells);
    const double from = table->back().first;
    const QuadResult r = integrate(dens, from, x, opt, s);
    acc += r.value;
    if (std::isinf(x)) x = from + (from - (*table)[table->size() - 2].first);
    table->push_back({x, acc});
  }
  for (auto& e : *table) e.second /= acc;
  cdf_table_ = table;
}

double Prior::total_mass() const {
  switch (kind_) {
    case PriorKind::PointMass:
    case PriorKind::NormalMeanPrec:
      return 1.0;
    case PriorKind::SymmetricPaired:
      return base_->total_mass();  // mirroring preserves mass
    case PriorKind::Density:
    case PriorKind::HalfLine:
      break;
  }
  QuadOptions opt;
  opt.rel_tol = 1e-11;
  auto dens = [this](double x) { return std::exp(logpdf(x)); };
  // second route: plain adaptive quadrature, independent of log_integrate's mode split
  double scale = 1.0;
  if (std::isfinite(support_.lo) && std::isinf(support_.hi)) {
    scale = 1.0;
    for (int k = -20; k <= 20; ++k) {
      if (logpdf(support_.lo + std::ldexp(1.0, k)) > logpdf(support_.lo + scale)) scale = std::ldexp(1.0, k);
    }
  }
  return integrate(dens, support_.lo, support_.hi, opt, scale).value;
}

double Prior::mean() const {
  switch (kind_) {
    case PriorKind::PointMass:
    case PriorKind::NormalMeanPrec:
      return location_;
    default:
      break;
  }
  auto first = [](double x) { return x; };
  // E[θ] = E[θ⁺] - E[θ⁻] split at 0 for log-scale evaluation
  const LogQuadResult pos = log_expectation([&](double x) { return x > 0 ? std::log(first(x)) : kNegInf; });
  const LogQuadResult neg = log_expectation([&](double x) { return x < 0 ? std::log(-x) : kNegInf; });
  return std::exp(pos.log_value) - std::exp(neg.log_value);
}

LogQuadResult Prior::log_expectation(const std::function<double(double)>& log_f, const QuadOptions& opt) const {
  switch (kind_) {
    case PriorKind::PointMass: {
      LogQuadResult r;
      r.log_value = log_f(location_);
      r.converged = true;
      r.evaluations = 1;
      return r;
    }
    case PriorKind::NormalMeanPrec:
    case PriorKind::Density:
    case PriorKind::HalfLine: {
      auto integrand = [&](double x) {
        const double lp = logpdf(x);
        return lp == kNegInf ? kNegInf : lp + log_f(x);
      };
      return log_integrate(integrand, support_.lo, support_.hi, opt);
    }
    case PriorKind::SymmetricPaired: {
      const PairingMap& r = *pairing_;
      auto paired = [&](double x) { return special::log_add_exp(log_f(x), log_f(r(x))); };
      if (base_->kind_ == PriorKind::PointMass) {
        LogQuadResult out;
        out.log_value = kLogHalf + paired(base_->location_);
        out.converged = true;
        out.evaluations = 2;
        return out;
      }
      auto integrand = [&](double x) {
        const double lp = base_->logpdf(x);
        return lp == kNegInf ? kNegInf : kLogHalf + lp + paired(x);
      };
      const double lo = std::max(base_->support_.lo, r.theta0());
      const double hi = base_->support_.hi;
      const double cut = r.upper_peak();
      if (r.is_reflection() || !(cut > lo && cut < hi)) return log_integrate(integrand, lo, hi, opt);
      // r(θ) is discontinuous at the θ-side peak; integrate each branch separately
      const LogQuadResult near = log_integrate(integrand, lo, cut, opt);
      const LogQuadResult far = log_integrate(integrand, cut, hi, opt);
      LogQuadResult out;
      out.log_value = special::log_add_exp(near.log_value, far.log_value);
      out.rel_error = std::max(near.rel_error, far.rel_error);
      out.evaluations = near.evaluations + far.evaluations;
      out.converged = near.converged && far.converged;
      return out;
    }
  }
  return {};
}

NuisancePrior NuisancePrior::gamma_precision(double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, ErrorCode::ParameterDomain, "gamma precision prior needs a, b > 0");
  return {NuisanceKind::GammaPrec, shape, rate};
}

NuisancePrior NuisancePrior::normal_location(double mean, double c) {
  require(c > 0.0, ErrorCode::ParameterDomain, "normal location prior needs c > 0");
  return {NuisanceKind::NormalLocation, mean, c};
}

std::string NuisancePrior::describe() const {
  switch (kind) {
    case NuisanceKind::DiffusePrecision: return "diffuse_precision";
    case NuisanceKind::DiffuseHalfPrecision: return "diffuse_half_precision";
    case NuisanceKind::FlatLocation: return "flat_location";
    case NuisanceKind::GammaPrec: return "gamma_precision(a=" + fmt_num(a) + ",b=" + fmt_num(b) + ")";
    case NuisanceKind::NormalLocation: return "normal_location(mean=" + fmt_num(a) + ",c=" + fmt_num(b) + ")";
  }
  return "unknown";
}

SphericalDensity SphericalDensity::normal(int dim, double scale) {
  require(dim >= 1 && scale > 0.0, ErrorCode::ParameterDomain, "spherical normal needs dim >= 1 and scale > 0");
  SphericalDensity h;
  h.kind_ = SphericalKind::Normal;
  h.dim_ = dim;
  h.scale_ = scale;
  h.log_norm_ = -0.5 * dim * std::log(2.0 * std::numbers::pi * scale * scale);
  h.label_ = "normal(scale=" + fmt_num(scale) + ")";
  return h;
}

SphericalDensity SphericalDensity::student_t(int dim, double scale, double df) {
  require(dim >= 1 && scale > 0.0 && df > 0.0, ErrorCode::ParameterDomain,
          "spherical t needs dim >= 1, scale > 0, df > 0");
  SphericalDensity h;
  h.kind_ = SphericalKind::StudentT;
  h.dim_ = dim;
  h.scale_ = scale;
  h.df_ = df;
  h.log_norm_ = special::log_gamma(0.5 * (df + dim)) - special::log_gamma(0.5 * df) -
                0.5 * dim * std::log(df * std::numbers::pi) - dim * std::log(scale);
  h.label_ = "student_t(scale=" + fmt_num(scale) + ",df=" + fmt_num(df) + ")";
  return h;
}

SphericalDensity SphericalDensity::moment(int dim, double scale) {
  SphericalDensity h = normal(dim, scale);
  h.kind_ = SphericalKind::Moment;
  h.log_norm_ -= std::log(dim * scale * scale);
  h.label_ = "moment(scale=" + fmt_num(scale) + ")";
  return h;
}

SphericalDensity SphericalDensity::custom_1d(std::function<double(double)> log_density, std::string label) {
  // symmetry check on a grid of 101 points
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.1 * i * (1.0 + 0.01 * i);
    const double a = log_density(x), b = log_density(-x);
    const bool both_zero = a == kNegInf && b == kNegInf;
    if (!both_zero && !(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)))) {
      fail(ErrorCode::ParameterDomain, "density " + label + " is not symmetric about 0 at x=" + fmt_num(x));
    }
  }
  SphericalDensity h;
  h.kind_ = SphericalKind::Custom;
  h.dim_ = 1;
  h.log_norm_ = -checked_log_mass(log_density, {kNegInf, kInf});
  h.custom_sampler_ = std::make_shared<const Prior>(Prior::density(log_density, {kNegInf, kInf}, label));
  h.custom_ = std::move(log_density);
  h.label_ = std::move(label);
  return h;
}

double SphericalDensity::log_density_sq(double r2) const {
  switch (kind_) {
    case SphericalKind::Normal:
      return log_norm_ - 0.5 * r2 / (scale_ * scale_);
    case SphericalKind::StudentT:
      return log_norm_ - 0.5 * (df_ + dim_) * std::log1p(r2 / (df_ * scale_ * scale_));
    case SphericalKind::Moment:
      return r2 > 0.0 ? log_norm_ + std::log(r2) - 0.5 * r2 / (scale_ * scale_) : kNegInf;
    case SphericalKind::Custom:
      return log_norm_ + custom_(std::sqrt(r2));
  }
  return kNegInf;
}

double SphericalDensity::log_density(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, ErrorCode::Domain, "point dimension does not match the density");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return log_density_sq(r2);
}

std::vector<double> SphericalDensity::sample(RngStream& rng) const {
  std::vector<double> z(static_cast<std::size_t>(dim_));
  double norm2 = 0.0;
  for (auto& v : z) {
    v = rng.normal();
    norm2 += v * v;
  }
  switch (kind_) {
    case SphericalKind::Normal:
      for (auto& v : z) v *= scale_;
      return z;
    case SphericalKind::StudentT: {
      const double w = std::sqrt(rng.chi_square(df_) / df_);
      for (auto& v : z) v *= scale_ / w;
      return z;
    }
    case SphericalKind::Moment: {
      const double radius = scale_ * std::sqrt(rng.chi_square(dim_ + 2.0));
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : z) v *= radius * inv;
      return z;
    }
    case SphericalKind::Custom:
      break;
  }
  return {custom_sampler_->sample(rng)};
}

SphericalDensity SphericalDensity::with_dim(int dim) const {
  switch (kind_) {
    case SphericalKind::Normal: return normal(dim, scale_);
    case SphericalKind::StudentT: return student_t(dim, scale_, df_);
    case SphericalKind::Moment: return moment(dim, scale_);
    case SphericalKind::Custom:
      require(dim == 1, ErrorCode::Unsupported, "custom radial profiles are one-dimensional");
      return *this;
  }
  return *this;
}

}  // namespace bfe
