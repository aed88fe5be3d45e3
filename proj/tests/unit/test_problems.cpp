#include <doctest.h>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <memory>
#include <vector>

#include "bfequiv/error.hpp"
#include "bfequiv/problems.hpp"

using namespace bfe;

namespace {

std::vector<ProblemPtr> catalogue_problems() {
  const auto normal = ExpFamilyModel::normal_unit_variance();
  std::vector<ProblemPtr> out;
  out.push_back(std::make_shared<ExpFamilyProblem>(false, normal, 0.0, 4, Prior::half_normal(0.0, 1.0)));
  out.push_back(paired_two_sided_problem(normal, 0.0, 4, Prior::half_normal(0.0, 1.0), 0.05));
  out.push_back(std::make_shared<ExpFamilyProblem>(false, ExpFamilyModel::exponential_rate(), -1.0, 6,
                                                   Prior::point_mass(-0.5)));
  out.push_back(std::make_shared<TTestProblem>(9, 0.0, 2.0, SphericalDensity::student_t(1, 1.0, 1.0)));
  out.push_back(std::make_shared<RegressionKnownVarProblem>(random_design(15, 3, 1), SphericalDensity::normal(3, 1.0)));
  out.push_back(
      std::make_shared<RegressionUnknownVarProblem>(random_design(15, 2, 2), SphericalDensity::normal(2, 1.0), 1.5));
  out.push_back(std::make_shared<TwoSampleKnownVarProblem>(5, 7, 1.0, 2.0, 1.0));
  out.push_back(std::make_shared<TwoSampleTProblem>(6, 8, 1.0, 0.7));
  out.push_back(std::make_shared<VarianceRatioProblem>(8, 11, false, Prior::shifted_exponential(1.0, 1.0)));
  out.push_back(std::make_shared<VarianceRatioProblem>(8, 11, true, Prior::point_mass(2.0)));
  out.push_back(std::make_shared<SubsetSelectionProblem>(random_design(25, 2, 3, true), random_design(25, 2, 4), 2.0, 1.0));
  out.push_back(std::make_shared<SubjectiveVarianceProblem>(10, 10, NuisancePrior::gamma_precision(2, 2), 1.0,
                                                            AltScale::Reference));
  return out;
}

// Empirical P(stat <= q) against the law at a few quantiles, 4.5 standard errors.
void check_law(const TestProblem& p, double theta, const DistSpec& law, LawTarget target, std::uint64_t seed) {
  RngStream rng(seed, 1);
  const int k = 20000;
  std::vector<double> stats;
  for (int i = 0; i < k; ++i) {
    const double s = p.statistic(p.summarize(p.simulate(theta, rng)));
    stats.push_back(target == LawTarget::SquaredStatistic ? s * s : s);
  }
  for (double prob : {0.1, 0.5, 0.9}) {
    const double q = quantile(law, prob);
    double below = 0;
    for (double s : stats) below += s <= q;
    CAPTURE(p.describe());
    CAPTURE(theta);
    CAPTURE(prob);
    CHECK(std::abs(below / k - prob) < 4.5 * std::sqrt(prob * (1 - prob) / k));
  }
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (const auto& p : catalogue_problems()) CHECK(problem_kind_from_string(p->id()) == p->kind());
  CHECK_THROWS_AS(problem_kind_from_string("NoSuchProblem"), Error);
}

TEST_CASE("null laws match simulation") {
  std::uint64_t seed = 100;
  for (const auto& p : catalogue_problems()) check_law(*p, p->theta0(), p->null_law(), LawTarget::Statistic, ++seed);
}

TEST_CASE("alternative laws match simulation") {
  std::uint64_t seed = 200;
  for (const auto& p : catalogue_problems()) {
    const double theta = p->kind() == ProblemKind::OneSidedExpFamily && p->theta0() < 0 ? -0.6
                         : p->theta0() == 1.0                                             ? 2.0
                                                                                          : p->theta0() + 0.8;
    if (auto alt = p->alt_law(theta)) check_law(*p, theta, alt->law, alt->target, ++seed);
  }
}

TEST_CASE("t statistic under the alternative is noncentral t") {
  const TTestProblem p(9, 0.0, 2.0, SphericalDensity::normal(1, 1.0));
  RngStream rng(5, 5);
  const double theta = 1.0;
  const boost::math::non_central_t ref(8, theta / 2.0 * 3.0);
  double below = 0;
  const int k = 20000;
  const double q = boost::math::quantile(ref, 0.3);
  for (int i = 0; i < k; ++i) below += p.statistic(p.summarize(p.simulate(theta, rng))) <= q;
  CHECK(std::abs(below / k - 0.3) < 4.5 * std::sqrt(0.21 / k));
}

TEST_CASE("classical regions have the requested size") {
  for (const auto& p : catalogue_problems()) {
    const CriticalRegion r = p->classical_region(0.05);
    const DistSpec law = p->null_law();
    const double size = r.shape == RegionShape::UpperTail ? sf(law, r.gamma2) : cdf(law, r.gamma1) + sf(law, r.gamma2);
    CAPTURE(p->describe());
    CHECK(size == doctest::Approx(0.05).epsilon(1e-9));
  }
  const SubjectiveVarianceProblem s(10, 10, NuisancePrior::gamma_precision(2, 2), 1.0, AltScale::Reference);
  const CriticalRegion r = s.classical_region(0.05);
  CHECK(r.gamma1 * r.gamma2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.rejects(r.gamma2 + 1e-9));
  CHECK_FALSE(r.rejects(r.gamma2));
}

TEST_CASE("Bayes factor through the statistic equals the raw-data factor") {
  for (const auto& p : catalogue_problems()) {
    if (!p->bf_is_function_of_statistic()) continue;
    RngStream rng(77, 0);
    for (int i = 0; i < 5; ++i) {
      const Summary s = p->summarize(p->simulate(p->theta0(), rng));
      CAPTURE(p->describe());
      CHECK(p->bayes_factor(s).log_value == doctest::Approx(p->bayes_factor_at(p->statistic(s)).log_value).epsilon(1e-9));
    }
  }
}

TEST_CASE("summaries reject malformed data") {
  const auto normal = ExpFamilyModel::normal_unit_variance();
  const ExpFamilyProblem p(false, normal, 0.0, 4, Prior::point_mass(1.0));
  Dataset d;
  d.x1 = {1.0, 2.0};
  CHECK_THROWS_AS(p.summarize(d), Error);
  const TwoSampleTProblem q(3, 3, 1.0, 1.0);
  Dataset e;
  e.x1 = {1, 1, 1};
  e.x2 = {2, 2, 2};
  CHECK_THROWS_AS(q.bayes_factor(q.summarize(e)), Error);
  CHECK_THROWS_AS(RegressionKnownVarProblem(Eigen::MatrixXd::Ones(5, 2), SphericalDensity::normal(2, 1.0)), Error);
}

TEST_CASE("subjective statistic transform") {
  CHECK(SubjectiveVarianceProblem::t_from_f(1.0) == doctest::Approx(0.0));
  CHECK(SubjectiveVarianceProblem::t_from_f(3.0) == doctest::Approx(SubjectiveVarianceProblem::t_from_f(1.0 / 3.0)));
  const SubjectiveVarianceProblem s(10, 10, NuisancePrior::gamma_precision(2, 2), 1.0, AltScale::Reference);
  CHECK_FALSE(s.bf_is_function_of_statistic());
  CHECK_THROWS_AS(s.bayes_factor_at(1.0), Error);
}
