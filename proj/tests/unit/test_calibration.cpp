#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <memory>

#include "bfequiv/calibration.hpp"
#include "bfequiv/error.hpp"
#include "bfequiv/power_lab.hpp"

using namespace bfe;

namespace {

std::shared_ptr<ExpFamilyProblem> one_sided(const Prior& prior) {
  return std::make_shared<ExpFamilyProblem>(false, ExpFamilyModel::normal_unit_variance(), 0.0, 4, prior);
}

// γ = √n z_{1-α} from Boost.
double oracle_gamma() { return 2.0 * boost::math::quantile(boost::math::normal(), 0.95); }

}  // namespace

TEST_CASE("one-sided normal threshold") {
  const auto c = calibrate_alpha(one_sided(Prior::point_mass(1.0)), 0.05);
  CHECK(c.rule.region.gamma2 == doctest::Approx(oracle_gamma()).epsilon(1e-12));
  CHECK(c.rule.region.gamma2 == doctest::Approx(3.289707).epsilon(1e-6));
  // point mass at 1: log λ = γ - n/2
  CHECK(std::log(c.rule.lambda) == doctest::Approx(oracle_gamma() - 2.0).epsilon(1e-12));
  CHECK(c.diagnostics.quantile_residual < 1e-12);
}

TEST_CASE("threshold is the same under every prior after inversion") {
  for (const Prior& p : {Prior::point_mass(1.0), Prior::half_normal(0.0, 1.0), Prior::shifted_exponential(0.0, 1.0),
                         Prior::half_student_t(0.0, 2.0, 3.0)}) {
    const auto prob = one_sided(p);
    const auto c = calibrate_alpha(prob, 0.05);
    const auto inv = gamma_from_lambda(*prob, c.rule.lambda);
    CAPTURE(p.describe());
    CHECK(inv.status == Feasibility::Ok);
    CHECK(std::abs(inv.region.gamma2 - oracle_gamma()) < 1e-6);
    CHECK(inv.implied_alpha == doctest::Approx(0.05).epsilon(1e-6));
  }
}

TEST_CASE("rounded lambda gives the nearby size") {
  const auto prob = one_sided(Prior::point_mass(1.0));
  const auto inv = gamma_from_lambda(*prob, 3.632);
  // γ = log 3.632 + 2
  CHECK(inv.region.gamma2 == doctest::Approx(std::log(3.632) + 2.0).epsilon(1e-10));
  CHECK(inv.implied_alpha == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("two-sided paired prior gives equal endpoint factors") {
  const auto p = paired_two_sided_problem(ExpFamilyModel::exponential_rate(), -1.0, 10,
                                          Prior::density([](double t) { return std::log(t + 1.0) + std::log(-t); },
                                                         Interval{-1.0, 0.0}, "b22"),
                                          0.05);
  const auto c = calibrate_alpha(p, 0.05);
  CHECK(c.diagnostics.endpoint_mismatch < 1e-8);
  CHECK(region_size(*p, c.rule.region) == doctest::Approx(0.05).epsilon(1e-10));
  // B is convex along the statistic, with its vertex inside the region
  const auto inv = gamma_from_lambda(*p, c.rule.lambda);
  CHECK(inv.region.gamma1 == doctest::Approx(c.rule.region.gamma1).epsilon(1e-7));
  CHECK(inv.region.gamma2 == doctest::Approx(c.rule.region.gamma2).epsilon(1e-7));
}

TEST_CASE("asymmetric prior is a class violation naming both endpoint factors") {
  auto p = std::make_shared<ExpFamilyProblem>(true, ExpFamilyModel::normal_unit_variance(), 0.0, 4,
                                              Prior::normal(0.7, 1.0));
  try {
    calibrate_alpha(p, 0.05);
    FAIL("expected a class violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClassViolation);
    const std::string msg = e.what();
    CHECK(msg.find("B(gamma1)") != std::string::npos);
    CHECK(msg.find("B(gamma2)") != std::string::npos);
  }
}

TEST_CASE("equal-B mode on an asymmetric prior") {
  auto p = std::make_shared<ExpFamilyProblem>(true, ExpFamilyModel::normal_unit_variance(), 0.0, 4,
                                              Prior::normal(0.7, 1.0));
  const auto c = calibrate_alpha(p, 0.05, TwoSidedMode::EqualBayesFactor);
  CHECK(region_size(*p, c.rule.region) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(p->bayes_factor_at(c.rule.region.gamma1).log_value ==
        doctest::Approx(p->bayes_factor_at(c.rule.region.gamma2).log_value).epsilon(1e-8));
}

TEST_CASE("lambda outside the range of B") {
  // conjugate prior: B has its minimum √(τ/(τ+n)) at t = 0
  auto p = std::make_shared<ExpFamilyProblem>(true, ExpFamilyModel::normal_unit_variance(), 0.0, 4,
                                              Prior::normal(0.0, 1.0));
  const double floor = std::sqrt(1.0 / 5.0);
  CHECK(gamma_from_lambda(*p, 0.9 * floor).status == Feasibility::AlwaysReject);
  CHECK_THROWS_AS(calibrate_lambda(p, 0.9 * floor), Error);
  const auto tight = gamma_from_lambda(*p, floor * (1.0 + 1e-6));
  CHECK(tight.status == Feasibility::Ok);
  CHECK(tight.region.gamma2 - tight.region.gamma1 < 0.02);
  // bounded B: the point-mass variance-ratio factor tends to θ^{ν2/2}
  auto v = std::make_shared<VarianceRatioProblem>(6, 6, false, Prior::point_mass(2.0));
  CHECK(gamma_from_lambda(*v, std::pow(2.0, 2.5) * 1.01).status == Feasibility::NeverReject);
  try {
    calibrate_lambda(v, std::pow(2.0, 2.5) * 1.01);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("verify reports full agreement and dumps nothing") {
  const auto c = calibrate_alpha(one_sided(Prior::half_normal(0.0, 1.0)), 0.05);
  const double th[] = {0.0, 1.0};
  const auto r = verify_equivalence(c.rule, th, 3, 5000, 1);
  CHECK(r.total == 5000);
  CHECK(r.all_agree());
  CHECK(r.disagreements.empty());
  CHECK(r.rejections_bayes == r.rejections_classical);
}

TEST_CASE("a deliberately mismatched rule is caught with dataset dumps") {
  auto c = calibrate_alpha(one_sided(Prior::point_mass(1.0)), 0.05);
  c.rule.lambda *= 1.5;
  const double th[] = {1.0};
  const auto r = verify_equivalence(c.rule, th, 3, 5000, 1, 3);
  CHECK_FALSE(r.all_agree());
  CHECK(r.disagreements.size() == 3);
  CHECK_FALSE(r.disagreements.front().data.empty());
}

TEST_CASE("exact one-sided power") {
  const auto c = calibrate_alpha(one_sided(Prior::point_mass(1.0)), 0.05);
  const double grid[] = {0.0, 1.0};
  const PowerCurve e = exact_power(c.rule, grid);
  // 1 - Φ(z_{0.95} - √n θ)
  const double oracle = boost::math::cdf(boost::math::complement(boost::math::normal(), 1.6448536269514722 - 2.0));
  CHECK(e.power[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(e.power[1] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(e.power[1] - 0.63876) < 1e-5);
}

TEST_CASE("common random numbers give identical curves for any worker count") {
  const auto c = calibrate_alpha(one_sided(Prior::half_normal(0.0, 1.0)), 0.05);
  const auto grid = default_grid(c.rule, 5);
  CHECK(grid.size() == 5);
  CHECK(grid.front() == 0.0);
  const auto a = compare_power(c.rule, grid, {11, 20000, 1});
  const auto b = compare_power(c.rule, grid, {11, 20000, 3});
  CHECK(a.identical());
  CHECK(a.bayes.power == b.bayes.power);
  CHECK(a.classical.rejections == b.classical.rejections);
  const auto ind = compare_power(c.rule, grid, {11, 20000, 1}, true);
  CHECK(ind.independent);
  const PowerCurve exact = exact_power(c.rule, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(a.bayes.power[i] - exact.power[i]) < 4.5 * a.bayes.se[i] + 1e-12);
    CHECK(std::abs(ind.bayes.power[i] - exact.power[i]) < 4.5 * ind.bayes.se[i] + 1e-12);
  }
}

TEST_CASE("exact power for squared targets") {
  auto t = std::make_shared<TTestProblem>(10, 0.0, 1.0, SphericalDensity::normal(1, 1.0));
  const auto c = calibrate_alpha(t, 0.05);
  const double grid[] = {0.0, 0.8};
  const PowerCurve e = exact_power(c.rule, grid);
  CHECK(e.power[0] == doctest::Approx(0.05).epsilon(1e-9));
  const auto mc = mc_power(c.rule, grid, {5, 40000, 1}, RuleSide::Classical);
  CHECK(std::abs(mc.power[1] - e.power[1]) < 4.5 * mc.se[1]);
}
