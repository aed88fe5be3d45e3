#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

#include "bfequiv/error.hpp"
#include "bfequiv/linalg.hpp"
#include "bfequiv/quadrature.hpp"
#include "bfequiv/radial_series.hpp"
#include "bfequiv/rng.hpp"
#include "bfequiv/roots.hpp"

using namespace bfe;

TEST_CASE("finite and improper integrals") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  const auto g = integrate([](double x) { return std::exp(-0.5 * x * x); }, -INFINITY, INFINITY);
  CHECK(g.value == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-11));
  const auto c = integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, INFINITY);
  CHECK(c.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-11));
}

TEST_CASE("log-scale integral of a sharp distant peak") {
  // ∫ exp(-(x - 500)² · 50) dx = sqrt(π/50)
  const auto r = log_integrate([](double x) { return -50.0 * (x - 500.0) * (x - 500.0) + 700.0; }, 0.0, INFINITY);
  CHECK(r.converged);
  CHECK(r.log_value == doctest::Approx(700.0 + 0.5 * std::log(std::numbers::pi / 50.0)).epsilon(1e-12));
}

TEST_CASE("log_integrate against Boost Gauss-Kronrod") {
  auto f = [](double x) { return std::log(x) * 2.0 - x * 1.3; };
  const auto mine = log_integrate(f, 0.0, 30.0);
  const double ref =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate([&](double x) { return std::exp(f(x)); }, 0.0,
                                                                    30.0, 15, 1e-14);
  CHECK(mine.log_value == doctest::Approx(std::log(ref)).epsilon(1e-11));
}

TEST_CASE("bracketed root and expansion") {
  const auto r = solve_bracketed([](double x) { return x * x * x - 2.0; }, 0.0, 5.0);
  CHECK(r.converged);
  CHECK(r.x == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  auto f = [](double x) { return std::exp(x) - 1e6; };
  const Bracket b =
      expand_bracket(f, 0.0, 1.0, [](double lo) { return lo; }, [](double hi) { return 2.0 * hi; }, 20);
  CHECK(f(b.lo) < 0.0);
  CHECK(f(b.hi) > 0.0);
  CHECK_THROWS_AS(expand_bracket([](double) { return 1.0; }, 0.0, 1.0, [](double lo) { return lo; },
                                 [](double hi) { return 2.0 * hi; }, 5),
                  Error);
  const auto m = golden_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -2.0, 2.0);
  CHECK(m.x == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("orthonormalisation") {
  RngStream rng(5, 1);
  Eigen::MatrixXd x(12, 3);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  const Orthonormalized o = orthonormalize(x);
  CHECK((o.z.transpose() * o.z - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-13);
  CHECK((x * o.q - o.z).norm() < 1e-12);
  CHECK((o.z * o.z.transpose() - hat_matrix(x)).norm() < 1e-10);
  Eigen::MatrixXd dup = x;
  dup.col(2) = 2.0 * x.col(0) - x.col(1);
  CHECK_THROWS_AS(orthonormalize(dup), Error);
  const Eigen::MatrixXd q = random_orthogonal(4, rng);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("sphere averages in closed form") {
  for (double x : {0.0, 0.3, 4.0, 60.0}) {
    CAPTURE(x);
    CHECK(log_sphere_average(1, x) == doctest::Approx(std::log(std::cosh(x))).epsilon(1e-13));
    if (x > 0) CHECK(log_sphere_average(3, x) == doctest::Approx(std::log(std::sinh(x) / x)).epsilon(1e-12));
    // p = 2: I0(x)
    CHECK(log_sphere_average(2, x) ==
          doctest::Approx(std::log(boost::math::cyl_bessel_i(0, x))).epsilon(1e-12));
  }
}

TEST_CASE("radial kernel series against quadrature") {
  for (int p : {1, 2, 5}) {
    const RadialKernel k(SphericalDensity::student_t(p, 1.3, 3.0), 2.0);
    for (double a : {0.1, 2.0, 7.5}) {
      CAPTURE(p);
      CAPTURE(a);
      const auto s = k.series(a * a);
      const auto q = k.log_phi(a);
      CHECK(s.converged);
      CHECK(std::abs(s.log_value - q.log_value) < 1e-9);
    }
  }
}
