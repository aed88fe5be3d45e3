#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include "bfequiv/bayes_factors.hpp"
#include "bfequiv/distributions.hpp"
#include "bfequiv/error.hpp"
#include "bfequiv/linalg.hpp"

using namespace bfe;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 25, 1e-13);
}

double normal_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Student-t prior as a scale mixture: δ | g ~ N(0, s²/g), g ~ Gamma(ν/2, rate ν/2),
// averaging the closed-form normal-prior factor over g.
double brute_t_test(double mean, double sum_sq, int n, double scale, double df) {
  const double r = n * mean * mean / sum_sq;
  auto normal_bf = [&](double v) { return std::exp(-0.5 * std::log1p(v) - 0.5 * n * std::log1p(-v / (1.0 + v) * r)); };
  const boost::math::gamma_distribution<double> mix(0.5 * df, 2.0 / df);
  // g = w² removes the endpoint singularity of the mixing density
  return gk([&](double w) { return w == 0.0 ? 0.0 : normal_bf(n * scale * scale / (w * w)) * boost::math::pdf(mix, w * w) * 2.0 * w; },
            0.0, kInf);
}

}  // namespace

TEST_CASE("one-sided point mass and half-normal against quadrature") {
  const auto m = ExpFamilyModel::normal_unit_variance();
  const int n = 4;
  for (double t : {-1.0, 0.5, 3.0, 8.0}) {
    CAPTURE(t);
    const double point = bf_one_sided(m, Prior::point_mass(1.0), 0.0, t, n).log_value;
    CHECK(point == doctest::Approx(t - 0.5 * n).epsilon(1e-14));
    const Prior hn = Prior::half_normal(0.0, 1.0);
    const double ref =
        gk([&](double th) { return std::exp(th * t - 0.5 * n * th * th) * 2.0 * normal_pdf(th, 0.0, 1.0); }, 0.0,
           kInf);
    CHECK(bf_one_sided(m, hn, 0.0, t, n).log_value == doctest::Approx(std::log(ref)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(bf_one_sided(m, Prior::normal(0.0, 1.0), 0.0, 1.0, n), Error);
}

TEST_CASE("exponential model Bayes factor against quadrature") {
  const auto m = ExpFamilyModel::exponential_rate();
  const Prior p = Prior::density([](double t) { return std::log(t + 1.0) + std::log(-t); }, Interval{-1.0, 0.0}, "b22");
  const int n = 10;
  for (double t : {3.0, 10.0, 25.0}) {
    // g(t, θ0, θ) = exp{(θ - θ0) t} (θ/θ0)^n
    const double ref = gk([&](double th) { return std::exp((th + 1.0) * t + n * std::log(th / -1.0)) * 6.0 * (th + 1.0) * -th; },
                          -1.0, 0.0);
    CAPTURE(t);
    CHECK(bf_one_sided(m, p, -1.0, t, n).log_value == doctest::Approx(std::log(ref)).epsilon(1e-9));
  }
}

TEST_CASE("paired exponential-model factor across the pairing jump") {
  // an instance where upper and lower sides peak at different heights, so r(θ) jumps
  const auto m = ExpFamilyModel::exponential_rate();
  const double th0 = -1.03016797584, a = 2.9126773223, b = 3.23988727499, alpha = 0.166290066653;
  const int n = 8;
  const auto law = *m.statistic_law(th0, n);
  auto pairing = std::make_shared<PairingMap>(m, th0, n, quantile(law, 0.5 * alpha), quantile(law, 1.0 - 0.5 * alpha));
  auto kernel = [&](double th) { return std::exp((a - 1.0) * std::log(th - th0) + (b - 1.0) * std::log(-th)); };
  const double mass = gk(kernel, th0, 0.0);
  const Prior base = Prior::density([&](double th) { return std::log(kernel(th)); }, Interval{th0, 0.0}, "beta");
  const Prior sym = Prior::symmetric_paired(base, pairing);
  const double cut = pairing->upper_peak();
  REQUIRE(cut > th0);
  REQUIRE(cut < 0.0);
  auto oracle = [&](double t) {
    auto g = [&](double th) { return std::exp((th - th0) * t + n * std::log(th / th0)); };
    auto f = [&](double th) { return 0.5 * kernel(th) / mass * (g(th) + g((*pairing)(th))); };
    return gk(f, th0, cut) + gk(f, cut, 0.0);
  };
  const double h = 0.078;
  double prev = 0.0, cur = 0.0;
  for (int k = -1; k <= 1; ++k) {
    const double t = 7.15752282215 + k * h;
    const double lb = bf_two_sided(m, sym, th0, t, n).log_value;
    CAPTURE(t);
    CHECK(lb == doctest::Approx(std::log(oracle(t))).epsilon(1e-9));
    if (k == -1) prev = std::exp(lb);
    if (k == 0) cur = std::exp(lb);
    if (k == 1) CHECK(std::exp(lb) - 2.0 * cur + prev > 0.0);
  }
}

TEST_CASE("two-sided conjugate normal") {
  const auto m = ExpFamilyModel::normal_unit_variance();
  const double tau = 0.5;
  const int n = 6;
  for (double t : {-4.0, 0.0, 2.5}) {
    // √(τ/(τ+n)) exp{t²/(2(n+τ))}
    const double closed = 0.5 * std::log(tau / (tau + n)) + 0.5 * t * t / (n + tau);
    CHECK(bf_normal_conjugate(t, n, 0.0, tau).log_value == doctest::Approx(closed).epsilon(1e-14));
    CHECK(bf_two_sided(m, Prior::normal(0.0, tau), 0.0, t, n).log_value == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("worked normal-mean example") {
  // n x̄² = 10, τ = 1: evaluate √(τ/(τ+n)) exp{½ n² x̄²/(n+τ)} directly
  for (double n : {100.0, 10000.0}) {
    const double xbar2 = 10.0 / n;
    const double direct = std::sqrt(1.0 / (1.0 + n)) * std::exp(0.5 * n * n * xbar2 / (n + 1.0));
    CHECK(section_example_exact(10.0, n) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(section_example_exact(10.0, 10000.0) == doctest::Approx(1.483).epsilon(0.005));
  CHECK(section_example_exact(10.0, 100.0) == doctest::Approx(14.06).epsilon(0.005));
  CHECK(section_example_approx(10.0, 10000.0) == doctest::Approx(1.484).epsilon(0.005));
  CHECK(section_example_approx(10.0, 100.0) == doctest::Approx(14.77).epsilon(0.005));
}

TEST_CASE("t-test Bayes factor") {
  const int n = 10;
  SUBCASE("normal prior has a closed form") {
    const double s = 1.7;
    const auto h = SphericalDensity::normal(1, s);
    for (double mean : {0.0, 0.4, 1.5}) {
      const double sum_sq = 9.0 + n * mean * mean;
      const double r = n * mean * mean / sum_sq;
      const double v = n * s * s;
      const double closed = -0.5 * std::log1p(v) - 0.5 * n * std::log1p(-v / (1.0 + v) * r);
      CAPTURE(mean);
      CHECK(bf_t_test(mean, sum_sq, n, h).log_value == doctest::Approx(closed).epsilon(1e-10));
      CHECK(bf_t_test(mean, sum_sq, n, h, BfMethod::Quadrature).log_value == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  SUBCASE("Cauchy prior against nested quadrature") {
    const auto h = SphericalDensity::student_t(1, 1.0, 1.0);
    for (double mean : {0.2, 0.9}) {
      const double sum_sq = 12.0 + n * mean * mean;
      CAPTURE(mean);
      CHECK(bf_t_test(mean, sum_sq, n, h).log_value ==
            doctest::Approx(std::log(brute_t_test(mean, sum_sq, n, 1.0, 1.0))).epsilon(1e-7));
    }
  }
  SUBCASE("depends on the data through the t statistic") {
    const auto h = SphericalDensity::moment(1, 1.0);
    const double mean = 0.6, sum_sq = 8.0;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
    const double t = mean / (sd / std::sqrt(double(n)));
    CHECK(bf_t_test_from_t(t, n, h).log_value == doctest::Approx(bf_t_test(mean, sum_sq, n, h).log_value).epsilon(1e-12));
    CHECK(bf_t_test_from_t(-t, n, h).log_value == doctest::Approx(bf_t_test_from_t(t, n, h).log_value).epsilon(1e-13));
  }
}

TEST_CASE("regression with known variance") {
  const double s = 0.8;
  for (int p : {1, 2, 4}) {
    for (double t2 : {0.0, 3.0, 25.0}) {
      const double v = s * s;
      const double closed = -0.5 * p * std::log1p(v) + 0.5 * v / (1.0 + v) * t2;
      CAPTURE(p);
      CAPTURE(t2);
      CHECK(bf_regression_known_var_norm(t2, SphericalDensity::normal(p, s)).log_value ==
            doctest::Approx(closed).epsilon(1e-10));
      CHECK(bf_regression_known_var_conjugate(t2, p, v).log_value == doctest::Approx(closed).epsilon(1e-14));
    }
  }
  const auto h = SphericalDensity::student_t(2, 1.0, 3.0);
  const double tv[] = {1.2, -2.1};
  const double series = bf_regression_known_var(tv, h).log_value;
  CHECK(bf_regression_known_var_cartesian(tv, h).log_value == doctest::Approx(series).epsilon(1e-8));
  const double rotated[] = {std::hypot(tv[0], tv[1]), 0.0};
  CHECK(bf_regression_known_var(rotated, h).log_value == doctest::Approx(series).epsilon(1e-12));
}

TEST_CASE("regression with unknown variance, normal prior") {
  const int n = 15, p = 3;
  const double s = 1.3;
  for (double r : {0.01, 0.3, 0.8}) {
    const double closed = -0.5 * p * std::log1p(s * s) - 0.5 * n * std::log1p(-s * s / (1.0 + s * s) * r);
    CAPTURE(r);
    CHECK(bf_regression_unknown_var(r, 1.0, n, p, SphericalDensity::normal(p, s)).log_value ==
          doctest::Approx(closed).epsilon(1e-9));
    CHECK(ratio_from_f(f_from_ratio(r, n, p), n, p) == doctest::Approx(r).epsilon(1e-13));
  }
}

TEST_CASE("two-sample known variance against quadrature") {
  const int n1 = 5, n2 = 8;
  const double tau1 = 2.0, tau2 = 0.5, c = 3.0;
  const double v = 1.0 / (n1 * tau1) + 1.0 / (n2 * tau2);
  for (double d : {0.0, 0.7, -2.0}) {
    // difference ~ N(θ, v), θ ~ N(0, v / c)
    const double ref =
        gk([&](double th) { return normal_pdf(d, th, v) * normal_pdf(th, 0.0, v / c); }, -kInf, kInf) /
        normal_pdf(d, 0.0, v);
    CHECK(bf_two_sample_means_known_var(1.0 + d, 1.0, n1, n2, tau1, tau2, c).log_value ==
          doctest::Approx(std::log(ref)).epsilon(1e-10));
  }
}

TEST_CASE("two-sample t against double quadrature") {
  const int n1 = 6, n2 = 9, n = n1 + n2;
  const double c = 2.0, ssw = 11.0, m = double(n1) * n2 / n;
  for (double d : {0.3, 1.4}) {
    // ∫∫ φ^{n/2-1} exp{-φ/2 [SSW + m(d-θ)²]} N(θ; 0, 1/(cφ)) dθ dφ over the θ = 0 integral
    auto num = gk(
        [&](double phi) {
          const double inner =
              gk([&](double th) { return std::exp(-0.5 * phi * m * (d - th) * (d - th)) * normal_pdf(th, 0.0, 1.0 / (c * phi)); },
                 -kInf, kInf);
          return std::pow(phi, 0.5 * n - 1.0) * std::exp(-0.5 * phi * ssw) * inner;
        },
        0.0, kInf);
    auto den = gk([&](double phi) { return std::pow(phi, 0.5 * n - 1.0) * std::exp(-0.5 * phi * (ssw + m * d * d)); },
                  0.0, kInf);
    const double ss1 = 4.0, ss2 = ssw - ss1;
    CAPTURE(d);
    CHECK(bf_two_sample_t(0.0, d, ss1, ss2, n1, n2, c).log_value == doctest::Approx(std::log(num / den)).epsilon(1e-8));
    CHECK(bf_two_sample_t_from_stat(d / std::sqrt(ssw), n1, n2, c).log_value ==
          doctest::Approx(std::log(num / den)).epsilon(1e-8));
  }
}

TEST_CASE("variance ratio against the precision integral") {
  const double nu1 = 9, nu2 = 11, s1 = 14.0, s2 = 6.0;
  const double theta = 2.5;
  // ∫ φ^{(ν1+ν2)/2-1} θ^{ν2/2} exp{-φ/2 (S1 + θ S2)} dφ over the θ = 1 value
  auto integral = [&](double th) {
    return gk([&](double phi) {
      return std::exp((0.5 * (nu1 + nu2) - 1.0) * std::log(phi) + 0.5 * nu2 * std::log(th) - 0.5 * phi * (s1 + th * s2));
    }, 0.0, kInf);
  };
  const double ref = integral(theta) / integral(1.0);
  // F on the SS1 / (θ SS2) scale: the ratio statistic is SS1/SS2 here
  CHECK(bf_variance_ratio(s1 / s2, nu1, nu2, Prior::point_mass(theta)).log_value ==
        doctest::Approx(std::log(ref)).epsilon(1e-10));
  const Prior ex = Prior::shifted_exponential(1.0, 1.0);
  const double mix = gk([&](double th) { return std::exp(ex.logpdf(th)) * integral(th) / integral(1.0); }, 1.0, kInf);
  CHECK(bf_variance_ratio(s1 / s2, nu1, nu2, ex).log_value == doctest::Approx(std::log(mix)).epsilon(1e-8));
  CHECK_THROWS_AS(bf_variance_ratio(1.0, nu1, nu2, Prior::point_mass(0.5)), Error);
}

TEST_CASE("subset selection through explicit hat matrices") {
  RngStream rng(3, 3);
  const int n = 20;
  Eigen::MatrixXd x1(n, 2), x2(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x1(i, 0) = 1.0;
    x1(i, 1) = rng.normal();
    x2(i, 0) = rng.normal();
    x2(i, 1) = rng.normal();
    y(i) = 0.5 + x1(i, 1) + 0.3 * x2(i, 0) + rng.normal();
  }
  Eigen::MatrixXd x(n, 4);
  x << x1, x2;
  const Eigen::MatrixXd h1 = x1 * (x1.transpose() * x1).inverse() * x1.transpose();
  const Eigen::MatrixXd h = x * (x.transpose() * x).inverse() * x.transpose();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double t = (y.transpose() * (h - h1) * y).value() / (y.transpose() * (id - h1) * y).value();
  const double c = 2.5;
  const double closed = std::log(c / (1 + c)) - 0.5 * (n - 2) * std::log1p(-t / (1 + c));
  CHECK(bf_subset_selection(y, x1, x2, c).log_value == doctest::Approx(closed).epsilon(1e-10));
}

TEST_CASE("subjective variance statistic") {
  // (Q+½)^{a+n/2} / [(Q/2 + T̃/2)(Q/2 + (1-T̃)/2)]^{a/2+n/4} equals 2^{a+n/2} B*^{a+n/2}
  const double a = 2, q = 0.3, tt = 0.35;
  const int n = 20;
  const double k = 0.5 * a + 0.25 * n;
  const double product_form = (a + 0.5 * n) * std::log(q + 0.5) - k * std::log((0.5 * q + 0.5 * tt) * (0.5 * q + 0.5 * (1 - tt)));
  const double t = 0.25 - tt * (1 - tt);
  CHECK(log_bf_subjective_full(q, t, a, n) + (a + 0.5 * n) * std::log(2.0) == doctest::Approx(product_form).epsilon(1e-13));
  CHECK(bf_subjective_variance(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(bf_subjective_variance(1.0, 0.1) < bf_subjective_variance(0.0, 0.1));
  CHECK_THROWS_AS(bf_subjective_variance(0.0, 0.3), Error);
}

TEST_CASE("point-mass threshold minimiser against grid search") {
  const auto m = ExpFamilyModel::normal_unit_variance();
  const JohnsonThreshold j = johnson_umpbt_threshold(m, 10.0, 10, 0.0);
  double best = 0, best_val = kInf;
  for (double th = 1e-5; th < 5.0; th += 1e-5) {
    const double v = (std::log(10.0) + 10 * 0.5 * th * th) / th;
    if (v < best_val) best_val = v, best = th;
  }
  CHECK(std::abs(j.theta_star - best) < 1e-4);
  CHECK(j.theta_star == doctest::Approx(0.6786).epsilon(1.5e-4));
  CHECK(johnson_umpbt_threshold(m, 0.5, 10, 0.0).boundary);
}
