// Acceptance driver: one PASS/FAIL line per criterion. `--only ACCk` (repeatable)
// restricts the run; the exit status is nonzero when any selected criterion fails.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bfequiv/bayes_factors.hpp"
#include "bfequiv/calibration.hpp"
#include "bfequiv/commands.hpp"
#include "bfequiv/equivalence_props.hpp"
#include "bfequiv/error.hpp"
#include "bfequiv/power_lab.hpp"
#include "bfequiv/problems.hpp"
#include "bfequiv/report_io.hpp"
#include "bfequiv/run_config.hpp"

namespace fs = std::filesystem;
using namespace bfe;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunConfig config(const std::string& name) { return RunConfig::load(fs::path(BFE_CONFIG_DIR) / (name + ".cfg")); }

std::string fmt(double x) { return format_number(x); }

const std::vector<std::string> kEquivalenceConfigs = {"one_sided_normal", "two_sided_paired", "t_test", "regression_f",
                                                       "two_sample_t",     "variance_ratio",   "subset_selection"};

DecisionRule alpha_rule(const ProblemPtr& p, const RunConfig& cfg) {
  return calibrate_alpha(p, cfg.get_double("run.alpha", 0.05)).rule;
}

// B(n, τ) evaluated straight from its defining expression with n x̄² and n/τ
// realised by τ = 1.
double example_oracle(double n_xbar_sq, double n_over_tau) {
  const long double tau = 1.0L;
  const long double n = n_over_tau * tau;
  const long double xbar_sq = n_xbar_sq / n;
  return static_cast<double>(std::sqrt(tau / (tau + n)) * std::exp(0.5L * n * n * xbar_sq / (n + tau)));
}

Verdict acc1() {
  const auto t0 = Clock::now();
  const fs::path out = fs::temp_directory_path() / "bfequiv_acc1";
  const CommandOutcome o = run_command("reproduce-sec6", RunConfig::parse(""), out);
  const double elapsed = seconds_since(t0);
  if (o.exit_code != kExitOk) return {false, "command failed: " + o.summary};
  const CsvColumns t = read_csv(out / "section6.csv");
  const auto& ratio = t.column("n_over_tau");
  const auto& exact = t.column("B_exact");
  const auto& approx = t.column("B_approx");
  const std::map<double, double> published = {{100.0, 14.8}, {10000.0, 1.5}};
  bool ok = t.rows() == 2 && elapsed < 1.0;
  std::ostringstream d;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double oracle = example_oracle(10.0, ratio[i]);
    const double e_rel = std::abs(exact[i] / oracle - 1.0);
    const auto it = published.find(ratio[i]);
    const double a_rel = it == published.end() ? 1.0 : std::abs(approx[i] / it->second - 1.0);
    ok = ok && e_rel <= 0.005 && a_rel <= 0.05;
    d << "n/tau=" << fmt(ratio[i]) << " exact " << fmt(exact[i]) << " (oracle " << fmt(oracle) << ") approx "
      << fmt(approx[i]) << " (published " << (it == published.end() ? "?" : fmt(it->second)) << "); ";
  }
  d << "time " << fmt(elapsed) << " s";
  return {ok, d.str()};
}

Verdict acc2() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (const auto& name : kEquivalenceConfigs) {
    const RunConfig cfg = config(name);
    const ProblemPtr p = build_problem(cfg);
    const DecisionRule rule = alpha_rule(p, cfg);
    const std::vector<double> thetas = default_verify_thetas(rule);
    const AgreementReport r = verify_equivalence(rule, thetas, cfg.get_u64("run.seed"), 100000, 1);
    ok = ok && r.all_agree() && r.total == 100000;
    d << name << " " << r.agree << "/" << r.total << "; ";
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 120.0;
  d << "time " << fmt(elapsed) << " s";
  return {ok, d.str()};
}

Verdict acc3() {
  const auto t0 = Clock::now();
  const ExpFamilyModel model = ExpFamilyModel::normal_unit_variance();
  const std::vector<Prior> priors = {Prior::point_mass(1.0), Prior::half_normal(0.0, 1.0),
                                     Prior::shifted_exponential(0.0, 1.0)};
  bool ok = true;
  std::ostringstream d;
  for (const auto& prior : priors) {
    const auto p = std::make_shared<ExpFamilyProblem>(false, model, 0.0, 4, prior);
    const CalibrationResult c = calibrate_alpha(p, 0.05);
    const InversionResult inv = gamma_from_lambda(*p, c.rule.lambda);
    const double gamma = inv.region.gamma2;
    ok = ok && inv.status == Feasibility::Ok && std::abs(gamma - 3.289707) <= 1e-6;
    d << prior.describe() << ": lambda " << fmt(c.rule.lambda) << " gamma " << fmt(gamma) << "; ";
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 1.0;
  d << "time " << fmt(elapsed) << " s";
  return {ok, d.str()};
}

Verdict acc4() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& name : kEquivalenceConfigs) {
    const RunConfig cfg = config(name);
    const ProblemPtr p = build_problem(cfg);
    const DecisionRule rule = alpha_rule(p, cfg);
    const std::vector<double> grid = default_grid(rule, 21);
    const McOptions opt{cfg.get_u64("run.seed"), 100000, 1};
    const CrnComparison c = compare_power(rule, grid, opt);
    std::size_t mism = 0;
    for (auto m : c.mismatches) mism += m;
    const bool same = c.identical() && c.bayes.power == c.classical.power && grid.size() == 21;
    ok = ok && same;
    d << name << (same ? " identical" : " DIFFERENT") << " (mismatches " << mism << "); ";
  }
  // 1 - Φ(z_{.95} - θ√n) at n = 4, θ = 1
  const auto p = std::make_shared<ExpFamilyProblem>(false, ExpFamilyModel::normal_unit_variance(), 0.0, 4,
                                                    Prior::point_mass(1.0));
  const DecisionRule rule = calibrate_alpha(p, 0.05).rule;
  const double theta[] = {1.0};
  const double exact = exact_power(rule, theta).power.at(0);
  const double z95 = 1.6448536269514722;
  const double oracle = 0.5 * std::erfc((z95 - 2.0) / std::sqrt(2.0));
  ok = ok && std::abs(exact - 0.63876) <= 1e-5 && std::abs(exact - oracle) <= 1e-10;
  d << "exact power at theta 1: " << fmt(exact) << " (oracle " << fmt(oracle) << ")";
  return {ok, d.str()};
}

Verdict acc5() {
  const auto t0 = Clock::now();
  const RunConfig cfg = config("dominance");
  auto p = std::dynamic_pointer_cast<const SubjectiveVarianceProblem>(build_problem(cfg));
  if (!p) return {false, "dominance config does not declare the subjective problem"};
  DominanceOptions opt;
  opt.alpha = 0.05;
  opt.mc = McOptions{cfg.get_u64("run.seed"), 1000000, 1};
  const std::vector<double> grid = cfg.get_list("run.grid");
  const DominanceReport r = dominance_study(p, grid, opt);
  const double elapsed = seconds_since(t0);
  const bool sizes = std::abs(r.size_subjective - 0.05) <= 0.001 && std::abs(r.size_classical - 0.05) <= 0.001;
  bool dominated = grid.size() == 4;
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    const double se = std::hypot(r.se_subjective[i], r.se_classical[i]);
    dominated = dominated && r.power_subjective[i] <= r.power_classical[i] + 3.0 * se;
  }
  const bool bridge = r.gamma_t <= r.lambda_tilde + 1e-9;
  std::ostringstream d;
  d << "sizes " << fmt(r.size_subjective) << "/" << fmt(r.size_classical) << (sizes ? " ok" : " OFF") << "; power";
  for (std::size_t i = 0; i < r.theta.size(); ++i)
    d << " " << fmt(r.theta[i]) << ":" << fmt(r.power_subjective[i]) << "<=" << fmt(r.power_classical[i]) << "?";
  d << (dominated ? " ok" : " VIOLATED") << "; bridge gamma " << fmt(r.gamma_t) << " <= lambda~ "
    << fmt(r.lambda_tilde) << (bridge ? " ok" : " VIOLATED") << "; time " << fmt(elapsed) << " s";
  return {sizes && dominated && bridge && elapsed < 300.0, d.str()};
}

Verdict acc6() {
  const auto t0 = Clock::now();
  const std::vector<PropertySpec> specs = catalogue();
  bool ok = specs.size() >= 12;
  std::ostringstream d;
  int failed = 0;
  for (PropertySpec spec : specs) {
    spec.trials = 200;
    const PropertyResult r = run_property(spec, kDefaultPropertySeed, 1);
    if (!r.ok()) {
      ++failed;
      d << "FAIL " << r.name << " " << r.passed << "/" << r.trials << "; ";
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && failed == 0 && elapsed < 600.0;
  d << specs.size() << " specs x 200 trials, " << failed << " failing; time " << fmt(elapsed) << " s";
  return {ok, d.str()};
}

SphericalDensity random_density(std::mt19937_64& g, int dim) {
  std::uniform_real_distribution<double> scale(0.3, 3.0);
  std::uniform_real_distribution<double> df(1.0, 10.0);
  switch (std::uniform_int_distribution<int>(0, 2)(g)) {
    case 0: return SphericalDensity::normal(dim, scale(g));
    case 1: return SphericalDensity::student_t(dim, scale(g), df(g));
    default: return SphericalDensity::moment(dim, scale(g));
  }
}

double rel_gap(const BfValue& a, const BfValue& b) { return std::abs(std::expm1(a.log_value - b.log_value)); }

Verdict acc7() {
  std::mt19937_64 g(7001);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst_t = 0, worst_known = 0, worst_unknown = 0;
  int errors = 0;
  for (int i = 0; i < 50; ++i) {
    try {
      const int n = std::uniform_int_distribution<int>(3, 40)(g);
      const double t = 6.0 * u01(g);
      const SphericalDensity h = random_density(g, 1);
      worst_t = std::max(worst_t, rel_gap(bf_t_test_from_t(t, n, h, BfMethod::CoshSeries),
                                          bf_t_test_from_t(t, n, h, BfMethod::Quadrature)));
    } catch (const Error&) {
      ++errors;
    }
    try {
      const int p = std::uniform_int_distribution<int>(1, 5)(g);
      const double t2 = 40.0 * u01(g);
      const SphericalDensity h = random_density(g, p);
      worst_known =
          std::max(worst_known, rel_gap(bf_regression_known_var_norm(t2, h, BfMethod::CoshSeries),
                                        bf_regression_known_var_norm(t2, h, BfMethod::Quadrature)));
    } catch (const Error&) {
      ++errors;
    }
    try {
      const int p = std::uniform_int_distribution<int>(1, 4)(g);
      const int n = std::uniform_int_distribution<int>(p + 3, 40)(g);
      const double ratio = 0.95 * u01(g);
      const SphericalDensity h = random_density(g, p);
      worst_unknown =
          std::max(worst_unknown, rel_gap(bf_regression_unknown_var(ratio, 1.0, n, p, h, BfMethod::CoshSeries),
                                          bf_regression_unknown_var(ratio, 1.0, n, p, h, BfMethod::Quadrature)));
    } catch (const Error&) {
      ++errors;
    }
  }
  const bool ok = errors == 0 && worst_t <= 1e-6 && worst_known <= 1e-6 && worst_unknown <= 1e-6;
  std::ostringstream d;
  d << "max relative gap: t-test " << fmt(worst_t) << ", regression known variance " << fmt(worst_known)
    << ", regression unknown variance " << fmt(worst_unknown) << "; evaluation errors " << errors;
  return {ok, d.str()};
}

Verdict acc8() {
  const ExpFamilyModel model = ExpFamilyModel::normal_unit_variance();
  const double lambda = 10.0, log_lambda = std::log(lambda);
  const int n = 10;
  const JohnsonThreshold j = johnson_umpbt_threshold(model, lambda, n, 0.0);
  double best = 0, best_obj = INFINITY;
  for (int k = 1; k <= 3000000; ++k) {
    const double th = k * 1e-6;
    const double obj = (log_lambda + n * (model.b(th) - model.b(0.0))) / th;
    if (obj < best_obj) best_obj = obj, best = th;
  }
  const bool star = std::abs(j.theta_star - 0.6786) <= 1e-4 && std::abs(j.theta_star - best) <= 1e-4;

  const RunConfig cfg = config("johnson");
  auto p = std::dynamic_pointer_cast<const ExpFamilyProblem>(build_problem(cfg));
  if (!p) return {false, "johnson config does not declare a one-sided problem"};
  const std::vector<double> grid = default_grid(calibrate_alpha(p, 0.05).rule, 21);
  const JohnsonReport r = johnson_comparison(p->model(), p->theta0(), p->n(), cfg.get_double("run.lambda"), 0.05,
                                             p->prior(), grid, McOptions{cfg.get_u64("run.seed"), 100000, 1});
  bool within = !r.rows.empty();
  for (const auto& row : r.rows)
    within = within && std::abs(row.power_johnson - row.power_ump) <= 3.0 * std::max(row.se_johnson, 1e-12);
  std::ostringstream d;
  d << "theta* " << fmt(j.theta_star) << " (grid oracle " << fmt(best) << "); recalibrated power vs UMP max gap "
    << fmt(r.max_gap_se) << " se over " << r.rows.size() << " points";
  return {star && within, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bfequiv acceptance"};
  std::vector<std::string> only;
  app.add_option("--only", only, "criterion id (ACC1..ACC8), repeatable");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"ACC1", acc1}, {"ACC2", acc2}, {"ACC3", acc3}, {"ACC4", acc4},
      {"ACC5", acc5}, {"ACC6", acc6}, {"ACC7", acc7}, {"ACC8", acc8}};
  const std::set<std::string> selected(only.begin(), only.end());
  for (const auto& id : selected) {
    bool known = false;
    for (const auto& c : criteria) known = known || c.first == id;
    if (!known) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
  }
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %s %s\n", id.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
