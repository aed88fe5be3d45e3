#include "bfequiv/equivalence_props.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "bfequiv/bayes_factors.hpp"
#include "bfequiv/calibration.hpp"
#include "bfequiv/error.hpp"
#include "bfequiv/linalg.hpp"
#include "bfequiv/parallel.hpp"
#include "bfequiv/problems.hpp"

namespace bfe {

namespace {

constexpr int kGrid = 200;
constexpr double kSlack = 1e-9;

double unif(RngStream& r, double a, double b) { return a + (b - a) * r.uniform(); }
int unif_int(RngStream& r, int a, int b) {
  return a + static_cast<int>(std::min<double>(b - a, std::floor(r.uniform() * (b - a + 1))));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

PropertyVerdict failed(std::string detail, std::vector<std::pair<std::string, double>> values = {}) {
  return {false, std::move(detail), std::move(values)};
}

std::vector<double> linspace(double a, double b, int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) v[i] = a + (b - a) * i / (k - 1);
  return v;
}

template <class F>
std::vector<double> eval_log_bf(const std::vector<double>& grid, F&& f) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(f(t));
  return out;
}

PropertyVerdict strictly_increasing(const std::vector<double>& grid, const std::vector<double>& log_b) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(log_b[k] > log_b[k - 1])) {
      return failed("log B not strictly increasing",
                    {{"t_prev", grid[k - 1]}, {"t", grid[k]}, {"logB_prev", log_b[k - 1]}, {"logB", log_b[k]}});
    }
  }
  return {};
}

PropertyVerdict convex(const std::vector<double>& grid, const std::vector<double>& log_b) {
  const double top = *std::max_element(log_b.begin(), log_b.end());
  std::vector<double> b(log_b.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = std::exp(log_b[k] - top);
  for (std::size_t k = 1; k + 1 < b.size(); ++k) {
    const double second = b[k + 1] - 2.0 * b[k] + b[k - 1];
    if (second < -kSlack * std::max({b[k - 1], b[k], b[k + 1]})) {
      return failed("negative second difference of B",
                    {{"t", grid[k]}, {"second_difference_scaled", second}, {"logB", log_b[k]}});
    }
  }
  return {};
}

PropertyVerdict relative_match(const char* what, double log_a, double log_b, double tol) {
  const double gap = std::abs(std::expm1(log_a - log_b));
  if (gap > tol) return failed(what, {{"logB_a", log_a}, {"logB_b", log_b}, {"relative_gap", gap}});
  return {};
}

SphericalDensity pick_spherical(int which, int dim, double scale) {
  switch (which % 3) {
    case 0: return SphericalDensity::normal(dim, scale);
    case 1: return SphericalDensity::student_t(dim, scale, 3.0);
    default: return SphericalDensity::moment(dim, scale);
  }
}

Prior pick_half_line(int which, double theta0, double scale) {
  switch (which % 4) {
    case 0: return Prior::point_mass(theta0 + scale);
    case 1: return Prior::half_normal(theta0, scale);
    case 2: return Prior::shifted_exponential(theta0, 1.0 / scale);
    default: return Prior::half_student_t(theta0, scale, 3.0);
  }
}

// Beta-shaped density on (theta0, 0) for the exponential-rate model.
Prior beta_on_rate_interval(double theta0, double a, double b) {
  std::ostringstream label;
  label << "beta_shape(" << a << "," << b << ") on (" << theta0 << ",0)";
  return Prior::density([=](double t) { return (a - 1.0) * std::log(t - theta0) + (b - 1.0) * std::log(-t); },
                        Interval{theta0, 0.0}, label.str());
}

std::vector<double> head(const std::vector<double>& v, std::size_t begin, std::size_t count) {
  return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(begin + count)};
}

int second_size(const PropertyInstance& inst) {
  return std::max(2, static_cast<int>(std::lround(inst.n * inst.params[0])));
}

// Decisions of rules calibrated at the same alpha for several prior scales c.
template <class Make>
PropertyVerdict decisions_agree_across_c(const Make& make, double alpha, const Dataset& data) {
  std::optional<bool> first;
  std::vector<std::pair<std::string, double>> values;
  for (double c : {0.1, 1.0, 10.0}) {
    ProblemPtr p = make(c);
    const CalibrationResult cal = calibrate_alpha(p, alpha);
    const Summary s = p->summarize(data);
    const double t = p->statistic(s);
    const double lb = p->bayes_factor(s).log_value;
    const bool bayes = lb > cal.rule.log_lambda();
    const bool classical = cal.rule.region.rejects(t);
    values.push_back({"c", c});
    values.push_back({"logB", lb});
    values.push_back({"log_lambda", cal.rule.log_lambda()});
    if (bayes != classical) {
      values.push_back({"statistic", t});
      return failed("Bayes and classical decisions differ", values);
    }
    if (first && *first != bayes) return failed("decision changes with c", values);
    first = bayes;
  }
  return {};
}

// ---------------------------------------------------------------- specs

PropertySpec monotone_one_sided_normal() {
  PropertySpec s;
  s.name = "monotone_one_sided_normal";
  s.claim = "one-sided normal mean: B(t) strictly increasing in the sufficient statistic for every prior on theta>theta0";
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 1, 50);
    i.variant = unif_int(r, 0, 3);
    i.params = {unif(r, -1.0, 1.0), unif(r, 0.2, 3.0)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const double theta0 = i.params[0], scale = i.params[1];
    const double n = i.n, rn = std::sqrt(n);
    ExpFamilyProblem p(false, ExpFamilyModel::normal_unit_variance(), theta0, i.n, pick_half_line(i.variant, theta0, scale));
    const auto grid = linspace(n * theta0 - 6.0 * rn, n * theta0 + 6.0 * rn + 3.0 * n * scale, kGrid);
    return strictly_increasing(grid, eval_log_bf(grid, [&](double t) { return p.bayes_factor_at(t).log_value; }));
  };
  return s;
}

PropertySpec monotone_one_sided_exponential() {
  PropertySpec s;
  s.name = "monotone_one_sided_exponential";
  s.claim = "one-sided exponential-rate model: B(t) strictly increasing in t = sum of observations";
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 1, 50);
    i.params = {unif(r, 0.5, 3.0), unif(r, 1.0, 4.0), unif(r, 1.0, 4.0)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const double theta0 = -i.params[0];
    const auto model = ExpFamilyModel::exponential_rate();
    ExpFamilyProblem p(false, model, theta0, i.n, beta_on_rate_interval(theta0, i.params[1], i.params[2]));
    const DistSpec null = p.null_law();
    const auto grid = linspace(quantile(null, 1e-4), 2.0 * quantile(null, 1.0 - 1e-4), kGrid);
    return strictly_increasing(grid, eval_log_bf(grid, [&](double t) { return p.bayes_factor_at(t).log_value; }));
  };
  return s;
}

PropertyVerdict paired_convexity(const ExpFamilyProblem& p, double alpha, double lo, double hi) {
  const CriticalRegion region = p.classical_region(alpha);
  const BfValue b1 = p.bayes_factor_at(region.gamma1), b2 = p.bayes_factor_at(region.gamma2);
  auto eq = relative_match("B(gamma1) != B(gamma2)", b1.log_value, b2.log_value, kEndpointTolerance);
  if (!eq.pass) {
    eq.values.push_back({"gamma1", region.gamma1});
    eq.values.push_back({"gamma2", region.gamma2});
    return eq;
  }
  const auto grid = linspace(lo, hi, kGrid);
  return convex(grid, eval_log_bf(grid, [&](double t) { return p.bayes_factor_at(t).log_value; }));
}

PropertySpec convexity_two_sided_normal() {
  PropertySpec s;
  s.name = "convexity_two_sided_normal";
  s.claim = "two-sided normal mean with a paired prior: B convex in t and B(gamma1) = B(gamma2)";
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 1, 40);
    i.variant = unif_int(r, 1, 3);
    i.params = {unif(r, -1.0, 1.0), unif(r, 0.2, 3.0), unif(r, 0.01, 0.2)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const double theta0 = i.params[0], alpha = i.params[2];
    const auto p = paired_two_sided_problem(ExpFamilyModel::normal_unit_variance(), theta0, i.n,
                                            pick_half_line(i.variant, theta0, i.params[1]), alpha);
    const CriticalRegion region = p->classical_region(alpha);
    const double pad = 2.0 * std::sqrt(static_cast<double>(i.n));
    return paired_convexity(*p, alpha, region.gamma1 - pad, region.gamma2 + pad);
  };
  return s;
}

PropertySpec convexity_two_sided_exponential() {
  PropertySpec s;
  s.name = "convexity_two_sided_exponential";
  s.claim = "two-sided exponential-rate model with a paired prior: B convex in t and B(gamma1) = B(gamma2)";
  s.trials = 200;
  s.min_n = 3;
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 3, 30);
    i.params = {unif(r, 0.5, 2.0), unif(r, 1.5, 4.0), unif(r, 1.5, 4.0), unif(r, 0.02, 0.2)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const double theta0 = -i.params[0], alpha = i.params[3];
    const auto model = ExpFamilyModel::exponential_rate();
    const auto p = paired_two_sided_problem(model, theta0, i.n, beta_on_rate_interval(theta0, i.params[1], i.params[2]),
                                            alpha);
    const CriticalRegion region = p->classical_region(alpha);
    return paired_convexity(*p, alpha, 0.5 * region.gamma1, 1.5 * region.gamma2);
  };
  return s;
}

PropertySpec t_test_depends_on_t_squared() {
  PropertySpec s;
  s.name = "t_test_depends_on_t_squared";
  s.claim = "normal mean with unknown variance: datasets sharing T^2 give the same Bayes factor";
  s.min_n = 3;
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n); };
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 3, 40);
    i.variant = unif_int(r, 0, 2);
    i.params = {unif(r, 0.2, 3.0), unif(r, 0.1, 10.0)};
    const double mu = unif(r, -2.0, 2.0);
    for (int k = 0; k < i.n; ++k) i.data.push_back(mu + r.normal());
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int n = i.n;
    TTestProblem p(n, 0.0, 1.0, pick_spherical(i.variant, 1, i.params[0]));
    Dataset a;
    a.x1 = head(i.data, 0, static_cast<std::size_t>(n));
    const auto sa = std::get<MeanSummary>(p.summarize(a));
    // same T from a differently shaped sample, and from a scaled reflection
    std::vector<double> z(a.x1.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = a.x1[k] * a.x1[k] * a.x1[k];
    double zm = 0.0, zs = 0.0;
    for (double v : z) zm += v;
    zm /= n;
    for (double v : z) zs += (v - zm) * (v - zm);
    zs = std::sqrt(zs / (n - 1));
    Dataset b, c;
    for (double v : z) b.x1.push_back((v - zm) / zs + sa.t_stat / std::sqrt(static_cast<double>(n)));
    for (double v : a.x1) c.x1.push_back(-i.params[1] * v);
    const double la = p.bayes_factor(p.summarize(a)).log_value;
    const double lb = p.bayes_factor(p.summarize(b)).log_value;
    const double lc = p.bayes_factor(p.summarize(c)).log_value;
    auto v = relative_match("reshaped sample with equal T^2 changes B", la, lb, 1e-10);
    if (!v.pass) return v;
    v = relative_match("scaled reflection changes B", la, lc, 1e-10);
    if (!v.pass) return v;
    return relative_match("B from T differs from B from data", la, p.bayes_factor_at(sa.t_stat).log_value, 1e-10);
  };
  return s;
}

PropertySpec t_test_monotone_in_t_squared() {
  PropertySpec s;
  s.name = "t_test_monotone_in_t_squared";
  s.claim = "normal mean with unknown variance: B strictly increasing in |T|";
  s.min_n = 2;
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 2, 60);
    i.variant = unif_int(r, 0, 2);
    i.params = {unif(r, 0.2, 3.0)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const auto h = pick_spherical(i.variant, 1, i.params[0]);
    const auto grid = linspace(0.0, 12.0, kGrid);
    return strictly_increasing(grid, eval_log_bf(grid, [&](double t) { return bf_t_test_from_t(t, i.n, h).log_value; }));
  };
  return s;
}

PropertySpec radiality_known_variance() {
  PropertySpec s;
  s.name = "radiality_known_variance";
  s.claim = "known-variance regression with a spherical prior: B depends on T only through |T|";
  s.min_n = 1;
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.variant = unif_int(r, 0, 5);
    i.n = 1 + i.variant % 2;  // dimension p
    i.params = {unif(r, 0.3, 3.0)};
    i.seed = r.next_u64();
    for (int k = 0; k < i.n; ++k) i.data.push_back(2.0 * r.normal());
    return i;
  };
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n); };
  s.check = [](const PropertyInstance& i) {
    const int p = i.n;
    const auto h = pick_spherical(i.variant / 2, p, i.params[0]);
    RngStream rng(i.seed, 0);
    const Eigen::MatrixXd q = random_orthogonal(p, rng);
    Eigen::VectorXd t(p);
    for (int k = 0; k < p; ++k) t(k) = i.data[k];
    const Eigen::VectorXd qt = q * t;
    const std::span<const double> ts(t.data(), p), qts(qt.data(), p);
    const double a = bf_regression_known_var_cartesian(ts, h).log_value;
    const double b = bf_regression_known_var_cartesian(qts, h).log_value;
    auto v = relative_match("Cartesian B changes under rotation", a, b, kSlack);
    if (!v.pass) return v;
    v = relative_match("radial B changes under rotation", bf_regression_known_var(ts, h).log_value,
                       bf_regression_known_var(qts, h).log_value, 1e-12);
    if (!v.pass) return v;
    return relative_match("Cartesian and radial B disagree", a, bf_regression_known_var_norm(t.squaredNorm(), h).log_value,
                          1e-6);
  };
  return s;
}

PropertySpec regression_f_monotone() {
  PropertySpec s;
  s.name = "regression_f_monotone";
  s.claim = "unknown-variance regression: B depends on y only through F and increases strictly in F";
  s.min_n = 6;
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n); };
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.variant = unif_int(r, 0, 8);
    const int p = 1 + i.variant % 3;
    i.n = unif_int(r, p + 3, 40);
    i.params = {unif(r, 0.3, 3.0)};
    i.seed = r.next_u64();
    for (int k = 0; k < i.n; ++k) i.data.push_back(r.normal() + 0.5);
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int p = 1 + i.variant % 3;
    if (i.n <= p + 1) return PropertyVerdict{};
    RegressionUnknownVarProblem prob(random_design(i.n, p, i.seed), pick_spherical(i.variant / 3, p, i.params[0]), 1.0);
    const auto grid = linspace(0.01, 10.0 * quantile(prob.null_law(), 0.99), kGrid);
    auto v = strictly_increasing(grid, eval_log_bf(grid, [&](double f) { return prob.bayes_factor_at(f).log_value; }));
    if (!v.pass) return v;
    Dataset a;
    a.y = Eigen::Map<const Eigen::VectorXd>(i.data.data(), i.n);
    const Eigen::MatrixXd& z = prob.design().z();
    RngStream rng(i.seed, 1);
    const Eigen::VectorXd coef = z.transpose() * a.y;
    Dataset b, c;
    b.y = z * (random_orthogonal(p, rng) * coef) + (a.y - z * coef);
    c.y = 3.7 * a.y;
    const double la = prob.bayes_factor(prob.summarize(a)).log_value;
    v = relative_match("response with equal F changes B", la, prob.bayes_factor(prob.summarize(b)).log_value, 1e-10);
    if (!v.pass) return v;
    return relative_match("scaled response changes B", la, prob.bayes_factor(prob.summarize(c)).log_value, 1e-10);
  };
  return s;
}

PropertySpec variance_ratio_monotone() {
  PropertySpec s;
  s.name = "variance_ratio_monotone";
  s.claim = "variance ratio: B strictly increasing in F for priors on theta>1";
  s.min_n = 2;
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 2, 30);
    i.variant = unif_int(r, 0, 5);
    i.params = {static_cast<double>(unif_int(r, 2, 30)), unif(r, 0.2, 3.0)};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int which = i.variant % 3;
    const double scale = i.params[1];
    Prior prior = which == 0 ? Prior::half_normal(1.0, scale)
                             : which == 1 ? Prior::shifted_exponential(1.0, 1.0 / scale) : Prior::point_mass(1.0 + scale);
    VarianceRatioProblem p(i.n, static_cast<int>(i.params[0]), i.variant >= 3, prior);
    const auto grid = linspace(0.01, 20.0, kGrid);
    return strictly_increasing(grid, eval_log_bf(grid, [&](double f) { return p.bayes_factor_at(f).log_value; }));
  };
  return s;
}

PropertySpec c_independence_known_variance() {
  PropertySpec s;
  s.name = "c_independence_two_sample_known_var";
  s.claim = "two normal means, known variances: calibrated decisions agree with the classical test for every c";
  s.min_n = 2;
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n + second_size(i)); };
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 2, 30);
    i.params = {unif(r, 0.3, 2.0), unif(r, 0.2, 5.0), unif(r, 0.2, 5.0), unif(r, 0.01, 0.2)};
    const int n2 = second_size(i);
    TwoSampleKnownVarProblem p(i.n, n2, i.params[1], i.params[2], 1.0);
    const double shift = unif(r, 0.5, 1.5) * std::sqrt(p.classical_region(i.params[3]).gamma2);
    RngStream data_rng(r.next_u64(), 0);
    const Dataset d = p.simulate(shift, data_rng);
    i.data = d.x1;
    i.data.insert(i.data.end(), d.x2.begin(), d.x2.end());
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int n2 = second_size(i);
    Dataset d;
    d.x1 = head(i.data, 0, static_cast<std::size_t>(i.n));
    d.x2 = head(i.data, static_cast<std::size_t>(i.n), static_cast<std::size_t>(n2));
    return decisions_agree_across_c(
        [&](double c) { return std::make_shared<TwoSampleKnownVarProblem>(i.n, n2, i.params[1], i.params[2], c); },
        i.params[3], d);
  };
  return s;
}

PropertySpec c_independence_two_sample_t() {
  PropertySpec s;
  s.name = "c_independence_two_sample_t";
  s.claim = "two normal means, common unknown variance: calibrated decisions agree with the t test for every c";
  s.min_n = 2;
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n + second_size(i)); };
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.n = unif_int(r, 2, 30);
    i.params = {unif(r, 0.3, 2.0), unif(r, 0.01, 0.2)};
    const int n2 = second_size(i);
    TwoSampleTProblem p(i.n, n2, 1.0, 1.0);
    const double crit = p.classical_region(i.params[1]).gamma2 * std::sqrt(i.n + n2 - 2.0);
    RngStream data_rng(r.next_u64(), 0);
    const Dataset d = p.simulate(unif(r, -1.5, 1.5) * crit, data_rng);
    i.data = d.x1;
    i.data.insert(i.data.end(), d.x2.begin(), d.x2.end());
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int n2 = second_size(i);
    Dataset d;
    d.x1 = head(i.data, 0, static_cast<std::size_t>(i.n));
    d.x2 = head(i.data, static_cast<std::size_t>(i.n), static_cast<std::size_t>(n2));
    return decisions_agree_across_c([&](double c) { return std::make_shared<TwoSampleTProblem>(i.n, n2, c, 1.0); },
                                    i.params[1], d);
  };
  return s;
}

PropertySpec c_independence_subset_selection() {
  PropertySpec s;
  s.name = "c_independence_subset_selection";
  s.claim = "nested regression with a g-prior: calibrated decisions agree with the partial F test for every c";
  s.min_n = 4;
  s.data_size = [](const PropertyInstance& i) { return static_cast<std::size_t>(i.n); };
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    const int p1 = unif_int(r, 1, 3), p2 = unif_int(r, 1, 3);
    i.n = unif_int(r, p1 + p2 + 3, 40);
    i.params = {static_cast<double>(p1), static_cast<double>(p2), unif(r, 0.01, 0.2)};
    i.seed = r.next_u64();
    SubsetSelectionProblem p(random_design(i.n, p1, i.seed), random_design(i.n, p2, i.seed + 1), 1.0, 1.0);
    const double df2 = i.n - p1 - p2;
    const double f_std = p.classical_region(i.params[2]).gamma2 * df2 / p2;
    const double ncp = unif(r, 0.5, 1.5) * std::max(0.5, p2 * (f_std - 1.0));
    RngStream data_rng(r.next_u64(), 0);
    const Dataset d = p.simulate(ncp, data_rng);
    i.data.assign(d.y.data(), d.y.data() + d.y.size());
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int p1 = static_cast<int>(i.params[0]), p2 = static_cast<int>(i.params[1]);
    if (i.n <= p1 + p2 + 1) return PropertyVerdict{};
    const Eigen::MatrixXd x1 = random_design(i.n, p1, i.seed), x2 = random_design(i.n, p2, i.seed + 1);
    Dataset d;
    d.y = Eigen::Map<const Eigen::VectorXd>(i.data.data(), i.n);
    return decisions_agree_across_c([&](double c) { return std::make_shared<SubsetSelectionProblem>(x1, x2, c, 1.0); },
                                    i.params[2], d);
  };
  return s;
}

PropertySpec subjective_conditions() {
  PropertySpec s;
  s.name = "subjective_variance_conditions";
  s.claim = "subjective variance factor: B*(Q,T) <= B*(0,T) for Q >= 0 and B* increasing in T";
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.params = {std::exp(unif(r, std::log(0.05), std::log(100.0)))};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    for (int a = 0; a < 100; ++a) {
      const double q = i.params[0] * a / 99.0;
      double prev = 0.0;
      for (int b = 0; b < 100; ++b) {
        const double t = 0.25 * b / 100.0;
        const double v = bf_subjective_variance(q, t), v0 = bf_subjective_variance(0.0, t);
        if (v > v0 * (1.0 + 1e-12)) return failed("B*(Q,T) exceeds B*(0,T)", {{"Q", q}, {"T", t}, {"B", v}, {"B0", v0}});
        if (b > 0 && !(v > prev)) return failed("B* not increasing in T", {{"Q", q}, {"T", t}, {"B", v}, {"B_prev", prev}});
        prev = v;
      }
    }
    return PropertyVerdict{};
  };
  return s;
}

PropertySpec series_matches_quadrature() {
  PropertySpec s;
  s.name = "series_matches_quadrature";
  s.claim = "cosh-series and direct quadrature evaluations of radial Bayes factors agree to 1e-6 relative";
  s.min_n = 2;
  s.generate = [](RngStream& r) {
    PropertyInstance i;
    i.variant = unif_int(r, 0, 8);
    i.n = unif_int(r, 6, 50);
    i.params = {unif(r, 0.2, 3.0), unif(r, 0.0, 1.0), static_cast<double>(unif_int(r, 1, 4))};
    return i;
  };
  s.check = [](const PropertyInstance& i) {
    const int kind = i.variant % 3, prior = i.variant / 3;
    const double scale = i.params[0], u = i.params[1];
    BfValue a, b;
    if (kind == 0) {
      const auto h = pick_spherical(prior, 1, scale);
      const double t = 8.0 * u;
      a = bf_t_test_from_t(t, i.n, h, BfMethod::CoshSeries);
      b = bf_t_test_from_t(t, i.n, h, BfMethod::Quadrature);
    } else if (kind == 1) {
      const int p = std::min(static_cast<int>(i.params[2]), i.n - 2);
      const auto h = pick_spherical(prior, p, scale);
      a = bf_regression_unknown_var(0.9 * u, 1.0, i.n, p, h, BfMethod::CoshSeries);
      b = bf_regression_unknown_var(0.9 * u, 1.0, i.n, p, h, BfMethod::Quadrature);
    } else {
      const int p = static_cast<int>(i.params[2]);
      const auto h = pick_spherical(prior, p, scale);
      a = bf_regression_known_var_norm(40.0 * u, h, BfMethod::CoshSeries);
      b = bf_regression_known_var_norm(40.0 * u, h, BfMethod::Quadrature);
    }
    return relative_match("series and quadrature disagree", a.log_value, b.log_value, 1e-6);
  };
  return s;
}

}  // namespace

std::vector<PropertySpec> catalogue() {
  return {monotone_one_sided_normal(),
          monotone_one_sided_exponential(),
          convexity_two_sided_normal(),
          convexity_two_sided_exponential(),
          t_test_depends_on_t_squared(),
          t_test_monotone_in_t_squared(),
          radiality_known_variance(),
          regression_f_monotone(),
          variance_ratio_monotone(),
          c_independence_known_variance(),
          c_independence_two_sample_t(),
          c_independence_subset_selection(),
          subjective_conditions(),
          series_matches_quadrature()};
}

namespace {

PropertyVerdict safe_check(const PropertySpec& spec, const PropertyInstance& inst) {
  try {
    return spec.check(inst);
  } catch (const std::exception& e) {
    return failed(std::string("evaluation error: ") + e.what());
  }
}

}  // namespace

PropertyInstance shrink_instance(const PropertySpec& spec, PropertyInstance inst, int& steps) {
  steps = 0;
  auto still_fails = [&](const PropertyInstance& cand) {
    try {
      return !spec.check(cand).pass;
    } catch (const std::exception&) {
      return false;  // a shrink that breaks the instance is not a smaller counterexample
    }
  };
  for (int round = 0; round < 40; ++round) {
    bool progressed = false;
    if (!inst.data.empty()) {
      PropertyInstance cand = inst;
      for (double& v : cand.data) v *= 0.5;
      if (still_fails(cand)) {
        inst = std::move(cand);
        progressed = true;
      }
    }
    if (inst.n / 2 >= spec.min_n && inst.n >= 2) {
      PropertyInstance cand = inst;
      cand.n = inst.n / 2;
      if (spec.data_size) cand.data.resize(std::min(cand.data.size(), spec.data_size(cand)));
      if (still_fails(cand)) {
        inst = std::move(cand);
        progressed = true;
      }
    }
    if (!progressed) break;
    ++steps;
  }
  return inst;
}

PropertyResult run_property(const PropertySpec& spec, std::uint64_t seed, int workers) {
  PropertyResult res;
  res.name = spec.name;
  res.claim = spec.claim;
  res.trials = spec.trials;
  const std::uint64_t tag = fnv1a(spec.name);
  std::vector<std::optional<PropertyFailure>> fails(static_cast<std::size_t>(spec.trials));
  std::vector<unsigned char> inconclusive(static_cast<std::size_t>(spec.trials), 0);
  parallel_for(static_cast<std::size_t>(spec.trials), workers, [&](std::size_t t) {
    RngStream rng(seed, substream(tag, t));
    PropertyInstance inst;
    try {
      inst = spec.generate(rng);
    } catch (const std::exception&) {
      inconclusive[t] = 1;
      return;
    }
    PropertyVerdict v = safe_check(spec, inst);
    if (v.pass) return;
    PropertyFailure f;
    f.trial = t;
    f.original = inst;
    f.shrunk = shrink_instance(spec, inst, f.shrink_steps);
    f.verdict = f.shrink_steps > 0 ? safe_check(spec, f.shrunk) : std::move(v);
    fails[t] = std::move(f);
  });
  for (std::size_t t = 0; t < fails.size(); ++t) {
    if (inconclusive[t]) {
      ++res.inconclusive;
    } else if (fails[t]) {
      res.failures.push_back(std::move(*fails[t]));
    } else {
      ++res.passed;
    }
  }
  return res;
}

std::string describe_instance(const PropertyInstance& inst) {
  std::ostringstream os;
  os.precision(12);
  os << "n=" << inst.n << " variant=" << inst.variant << " seed=" << inst.seed << " params=[";
  for (std::size_t k = 0; k < inst.params.size(); ++k) os << (k ? " " : "") << inst.params[k];
  os << "] data=[";
  for (std::size_t k = 0; k < inst.data.size(); ++k) os << (k ? " " : "") << inst.data[k];
  os << "]";
  return os.str();
}

std::string property_transcript(const std::vector<PropertyResult>& results) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& r : results) {
    os << (r.ok() ? "PASS " : "FAIL ") << r.name << " " << r.passed << "/" << r.trials;
    if (r.inconclusive) os << " inconclusive=" << r.inconclusive;
    os << " :: " << r.claim << "\n";
    for (const auto& f : r.failures) {
      os << "  trial " << f.trial << ": " << f.verdict.detail << "\n";
      os << "    original " << describe_instance(f.original) << "\n";
      os << "    shrunk (" << f.shrink_steps << " steps) " << describe_instance(f.shrunk) << "\n";
      for (const auto& [k, v] : f.verdict.values) os << "    " << k << " = " << v << "\n";
    }
  }
  return os.str();
}

}  // namespace bfe
