#include "bfequiv/power_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfequiv/error.hpp"
#include "bfequiv/parallel.hpp"
#include "bfequiv/roots.hpp"

namespace bfe {

namespace {

constexpr std::uint64_t kIndependentSalt = 0xc1a551ca1ull;

double binomial_se(double p, std::size_t n) { return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / n); }

double rejection_probability(const AltLaw& alt, const CriticalRegion& region) {
  const DistSpec& law = alt.law;
  auto upper = [&](double g) { return std::isfinite(g) ? sf(law, g) : (g < 0 ? 1.0 : 0.0); };
  auto lower = [&](double g) { return std::isfinite(g) ? cdf(law, g) : (g > 0 ? 1.0 : 0.0); };
  if (alt.target == LawTarget::Statistic) {
    if (region.shape == RegionShape::UpperTail) return upper(region.gamma2);
    return lower(region.gamma1) + upper(region.gamma2);
  }
  require(region.shape == RegionShape::TwoTail && std::abs(region.gamma1 + region.gamma2) <=
                                                      1e-12 * std::max(1.0, std::abs(region.gamma2)),
          ErrorCode::Unsupported, "squared-statistic law needs a symmetric two-sided region");
  return upper(region.gamma2 * region.gamma2);
}

struct Tally {
  std::size_t bayes = 0, classical = 0, mismatch = 0;
};

// Runs `per_dataset` over N datasets at each grid point, chunked over substreams.
template <class Fn>
std::vector<Tally> run_grid(std::span<const double> grid, const McOptions& opt, std::uint64_t seed, Fn per_dataset) {
  require(opt.n >= 1, ErrorCode::ParameterDomain, "Monte Carlo size must be positive");
  const std::size_t chunks = chunk_count(opt.n);
  std::vector<Tally> parts(grid.size() * chunks);
  parallel_for(parts.size(), opt.workers, [&](std::size_t job) {
    const std::size_t g = job / chunks, c = job % chunks;
    RngStream rng(seed, substream(g + 1, c));
    const std::size_t count = std::min(opt.n, (c + 1) * kMcChunk) - c * kMcChunk;
    Tally& t = parts[job];
    for (std::size_t i = 0; i < count; ++i) per_dataset(grid[g], rng, t);
  });
  std::vector<Tally> out(grid.size());
  for (std::size_t job = 0; job < parts.size(); ++job) {
    Tally& t = out[job / chunks];
    t.bayes += parts[job].bayes;
    t.classical += parts[job].classical;
    t.mismatch += parts[job].mismatch;
  }
  return out;
}

PowerCurve curve_from_counts(std::span<const double> grid, const std::vector<std::size_t>& counts, std::size_t n,
                             double alpha, std::string method) {
  PowerCurve c;
  c.theta.assign(grid.begin(), grid.end());
  c.method = std::move(method);
  c.alpha = alpha;
  c.n_mc = n;
  c.rejections = counts;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double p = static_cast<double>(counts[k]) / n;
    c.power.push_back(p);
    c.se.push_back(binomial_se(p, n));
  }
  return c;
}

}  // namespace

PowerCurve exact_power(const DecisionRule& rule, std::span<const double> grid) {
  require(rule.problem != nullptr, ErrorCode::Domain, "decision rule has no problem");
  PowerCurve c;
  c.method = "exact";
  c.alpha = rule.alpha;
  for (double theta : grid) {
    const auto alt = rule.problem->alt_law(theta);
    if (!alt) fail(ErrorCode::Unsupported, "no exact alternative law for " + rule.problem->id());
    c.theta.push_back(theta);
    c.power.push_back(std::clamp(rejection_probability(*alt, rule.region), 0.0, 1.0));
    c.se.push_back(0.0);
  }
  return c;
}

PowerCurve mc_power(const DecisionRule& rule, std::span<const double> grid, const McOptions& opt, RuleSide side) {
  require(rule.problem != nullptr, ErrorCode::Domain, "decision rule has no problem");
  const TestProblem& p = *rule.problem;
  const double log_lambda = rule.log_lambda();
  auto tallies = run_grid(grid, opt, opt.seed, [&](double theta, RngStream& rng, Tally& t) {
    const Summary s = p.summarize(p.simulate(theta, rng));
    if (side == RuleSide::Bayes)
      t.bayes += p.bayes_factor(s).log_value > log_lambda;
    else
      t.classical += rule.region.rejects(p.statistic(s));
  });
  std::vector<std::size_t> counts;
  for (const auto& t : tallies) counts.push_back(side == RuleSide::Bayes ? t.bayes : t.classical);
  return curve_from_counts(grid, counts, opt.n, rule.alpha, side == RuleSide::Bayes ? "mc-bayes" : "mc-classical");
}

bool CrnComparison::identical() const {
  if (independent) return false;
  for (std::size_t k = 0; k < mismatches.size(); ++k)
    if (mismatches[k] != 0 || bayes.rejections[k] != classical.rejections[k]) return false;
  return true;
}

CrnComparison compare_power(const DecisionRule& rule, std::span<const double> grid, const McOptions& opt,
                            bool independent) {
  CrnComparison out;
  out.independent = independent;
  if (independent) {
    out.bayes = mc_power(rule, grid, opt, RuleSide::Bayes);
    McOptions other = opt;
    other.seed = opt.seed ^ kIndependentSalt;
    out.classical = mc_power(rule, grid, other, RuleSide::Classical);
    out.mismatches.assign(grid.size(), 0);
    return out;
  }
  require(rule.problem != nullptr, ErrorCode::Domain, "decision rule has no problem");
  const TestProblem& p = *rule.problem;
  const double log_lambda = rule.log_lambda();
  auto tallies = run_grid(grid, opt, opt.seed, [&](double theta, RngStream& rng, Tally& t) {
    const Summary s = p.summarize(p.simulate(theta, rng));
    const bool b = p.bayes_factor(s).log_value > log_lambda;
    const bool c = rule.region.rejects(p.statistic(s));
    t.bayes += b;
    t.classical += c;
    t.mismatch += (b != c);
  });
  std::vector<std::size_t> nb, nc;
  for (const auto& t : tallies) {
    nb.push_back(t.bayes);
    nc.push_back(t.classical);
    out.mismatches.push_back(t.mismatch);
  }
  out.bayes = curve_from_counts(grid, nb, opt.n, rule.alpha, "mc-bayes-crn");
  out.classical = curve_from_counts(grid, nc, opt.n, rule.alpha, "mc-classical-crn");
  return out;
}

namespace {

double theta_at_power(const DecisionRule& rule, double target) {
  const TestProblem& p = *rule.problem;
  const double t0 = p.theta0();
  const Interval range = p.alternative_range();
  auto excess = [&](double theta) {
    const double th[1] = {theta};
    return exact_power(rule, th).power[0] - target;
  };
  if (std::isfinite(range.hi)) {
    const double edge = range.hi - 1e-9 * std::max(1.0, std::abs(range.hi - t0));
    if (excess(edge) <= 0.0) return edge;
    return solve_bracketed(excess, t0, edge, 1e-10).x;
  }
  double step = 0.125 * std::max(1.0, std::abs(t0));
  double lo = t0, hi = t0 + step;
  for (int k = 0; excess(hi) < 0.0; ++k) {
    require(k < 200, ErrorCode::NonConvergence, "classical power never reaches the grid target");
    lo = hi;
    step *= 2.0;
    hi = t0 + step;
  }
  return solve_bracketed(excess, lo, hi, 1e-10 * std::max(1.0, hi)).x;
}

}  // namespace

std::vector<double> default_grid(const DecisionRule& rule, int points, double top_power) {
  require(points >= 2, ErrorCode::ParameterDomain, "grid needs at least two points");
  require(top_power > rule.alpha && top_power < 1.0, ErrorCode::ParameterDomain, "grid power target must exceed alpha");
  const double t0 = rule.problem->theta0();
  const double top = theta_at_power(rule, top_power);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[k] = t0 + (top - t0) * k / (points - 1);
  return grid;
}

std::vector<double> default_verify_thetas(const DecisionRule& rule) {
  std::vector<double> thetas{rule.problem->theta0()};
  for (double target : {0.3, 0.6, 0.9}) {
    if (target <= rule.alpha) continue;
    thetas.push_back(theta_at_power(rule, target));
  }
  return thetas;
}

// ---------------------------------------------------------------- dominance

DominanceReport dominance_study(const std::shared_ptr<const SubjectiveVarianceProblem>& problem,
                                std::span<const double> grid, const DominanceOptions& opt) {
  require(problem != nullptr, ErrorCode::Domain, "no problem given");
  const SubjectiveVarianceProblem& p = *problem;
  const std::size_t n = opt.mc.n;
  require(n >= 1000, ErrorCode::ParameterDomain, "dominance study needs at least 1000 datasets per point");

  DominanceReport rep;
  rep.classical_region = p.classical_region(opt.alpha);
  const CriticalRegion& region = rep.classical_region;

  // Null sample shared by both size calibrations.
  std::vector<double> log_b(n);
  std::vector<unsigned char> classical_null(n);
  const std::size_t chunks = chunk_count(n);
  parallel_for(chunks, opt.mc.workers, [&](std::size_t c) {
    RngStream rng(opt.mc.seed, substream(0, c));
    const std::size_t end = std::min(n, (c + 1) * kMcChunk);
    for (std::size_t i = c * kMcChunk; i < end; ++i) {
      const Summary s = p.summarize(p.simulate(1.0, rng));
      log_b[i] = p.bayes_factor(s).log_value;
      classical_null[i] = region.rejects(p.statistic(s));
    }
  });
  std::size_t classical_hits = 0;
  for (auto v : classical_null) classical_hits += v;
  rep.size_classical = static_cast<double>(classical_hits) / n;
  rep.se_size_classical = binomial_se(rep.size_classical, n);

  // Stochastic bisection on log λ.
  const double tol = 2.0 * binomial_se(opt.alpha, n);
  double lo = *std::min_element(log_b.begin(), log_b.end());
  double hi = *std::max_element(log_b.begin(), log_b.end());
  double log_lambda = 0.5 * (lo + hi);
  double size = 1.0;
  for (rep.probes = 1; rep.probes <= opt.max_probes; ++rep.probes) {
    log_lambda = 0.5 * (lo + hi);
    std::size_t hits = 0;
    for (double v : log_b) hits += v > log_lambda;
    size = static_cast<double>(hits) / n;
    if (std::abs(size - opt.alpha) < tol) break;
    (size > opt.alpha ? lo : hi) = log_lambda;
  }
  rep.probes = std::min(rep.probes, opt.max_probes);
  rep.lambda = std::exp(log_lambda);
  rep.size_subjective = size;
  rep.se_size_subjective = binomial_se(size, n);
  rep.size_calibrated = std::abs(size - opt.alpha) < tol;
  if (!rep.size_calibrated)
    fail(ErrorCode::NonConvergence, "subjective test size calibration did not reach alpha within " +
                                        std::to_string(opt.max_probes) + " probes (size " + std::to_string(size) + ")");

  // Powers under common random numbers.
  rep.theta.assign(grid.begin(), grid.end());
  auto tallies = run_grid(grid, opt.mc, opt.mc.seed, [&](double theta, RngStream& rng, Tally& t) {
    const Summary s = p.summarize(p.simulate(theta, rng));
    t.bayes += p.bayes_factor(s).log_value > log_lambda;
    t.classical += region.rejects(p.statistic(s));
  });
  rep.verdict = true;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& t : tallies) {
    const double ps = static_cast<double>(t.bayes) / n, pc = static_cast<double>(t.classical) / n;
    const double ss = binomial_se(ps, n), sc = binomial_se(pc, n);
    rep.power_subjective.push_back(ps);
    rep.se_subjective.push_back(ss);
    rep.power_classical.push_back(pc);
    rep.se_classical.push_back(sc);
    const double combined = std::sqrt(ss * ss + sc * sc);
    const double z = combined > 0.0 ? (ps - pc) / combined : (ps > pc ? std::numeric_limits<double>::infinity() : 0.0);
    rep.max_violation = std::max(rep.max_violation, z);
    if (ps > pc + 3.0 * combined) rep.verdict = false;
  }

  // Classical region {F < 1/γ} ∪ {F > γ} is {T > t(γ)}; B*(0, T) > λ is {T > 1/4 - 1/(4λ²)}.
  rep.gamma_t = SubjectiveVarianceProblem::t_from_f(region.gamma2);
  rep.lambda_tilde = 0.25 - 1.0 / (4.0 * rep.lambda * rep.lambda);
  rep.bridge_holds = rep.gamma_t <= rep.lambda_tilde + opt.bridge_tolerance;

  rep.q_bound_holds = true;
  rep.monotone_in_t = true;
  const double q_max = std::max(10.0, 10.0 * p.b());
  for (int i = 0; i < 100; ++i) {
    const double q = q_max * i / 99.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 100; ++j) {
      const double t = 0.25 * j / 100.0;
      const double v = bf_subjective_variance(q, t);
      if (v > bf_subjective_variance(0.0, t) * (1.0 + 1e-12)) rep.q_bound_holds = false;
      if (j > 0 && !(v > prev)) rep.monotone_in_t = false;
      prev = v;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- Johnson comparison

JohnsonReport johnson_comparison(const ExpFamilyModel& model, double theta0, int n, double lambda, double alpha,
                                 const Prior& reference, std::span<const double> grid, const McOptions& opt) {
  JohnsonReport rep;
  rep.lambda = lambda;
  rep.alpha = alpha;
  rep.reference_prior = reference.describe();
  rep.threshold = johnson_umpbt_threshold(model, lambda, n, theta0);
  if (rep.threshold.boundary) {
    rep.verdict = true;
    return rep;
  }
  auto johnson = std::make_shared<ExpFamilyProblem>(false, model, theta0, n, Prior::point_mass(rep.threshold.theta_star));
  const InversionResult raw = gamma_from_lambda(*johnson, lambda);
  rep.raw_region = raw.region;
  rep.raw_implied_alpha = raw.implied_alpha;

  const CalibrationResult cj = calibrate_alpha(johnson, alpha);
  rep.recalibrated_lambda = cj.rule.lambda;
  rep.region = cj.rule.region;
  auto ref_problem = std::make_shared<ExpFamilyProblem>(false, model, theta0, n, reference);
  const CalibrationResult cr = calibrate_alpha(ref_problem, alpha);

  const PowerCurve pj = mc_power(cj.rule, grid, opt, RuleSide::Bayes);
  const PowerCurve pr = mc_power(cr.rule, grid, opt, RuleSide::Bayes);
  const PowerCurve ump = exact_power(cj.rule, grid);
  rep.verdict = true;
  const double floor_se = 1.0 / static_cast<double>(opt.n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    JohnsonRow row{grid[k], pj.power[k], pj.se[k], pr.power[k], pr.se[k], ump.power[k]};
    const double se = std::max(row.se_johnson, floor_se);
    const double gap = std::abs(row.power_johnson - row.power_ump) / se;
    rep.max_gap_se = std::max(rep.max_gap_se, gap);
    const double combined = std::max(std::hypot(row.se_johnson, row.se_reference), floor_se);
    if (gap > 3.0 || std::abs(row.power_johnson - row.power_reference) > 3.0 * combined) rep.verdict = false;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace bfe
