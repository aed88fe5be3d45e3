#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/non_central_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "bfequiv/distributions.hpp"
#include "bfequiv/error.hpp"
#include "bfequiv/special_functions.hpp"

namespace bm = boost::math;
using namespace bfe;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class BoostDist>
void check_against(const DistSpec& d, const BoostDist& ref, std::initializer_list<double> xs, double tol) {
  for (double x : xs) {
    CAPTURE(d.describe());
    CAPTURE(x);
    CHECK(rel(pdf(d, x), bm::pdf(ref, x)) < tol);
    CHECK(rel(cdf(d, x), bm::cdf(ref, x)) < tol);
    CHECK(rel(sf(d, x), bm::cdf(bm::complement(ref, x))) < tol);
  }
  for (double p : {1e-10, 1e-4, 0.05, 0.5, 0.95, 0.999}) {
    CAPTURE(d.describe());
    CAPTURE(p);
    CHECK(rel(quantile(d, p), bm::quantile(ref, p)) < 100 * tol);
  }
}

}  // namespace

TEST_CASE("special functions match Boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 150.0})
    for (double x : {0.01, 0.7, 3.0, 12.0, 200.0}) {
      CAPTURE(a);
      CAPTURE(x);
      CHECK(rel(special::gamma_p(a, x), bm::gamma_p(a, x)) < 1e-12);
      if (bm::gamma_q(a, x) > 1e-300) CHECK(rel(special::gamma_q(a, x), bm::gamma_q(a, x)) < 1e-11);
    }
  for (double a : {0.5, 2.0, 7.5, 60.0})
    for (double b : {0.5, 3.0, 40.0})
      for (double x : {0.001, 0.2, 0.5, 0.93}) {
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(x);
        CHECK(rel(special::beta_inc(a, b, x), bm::ibeta(a, b, x)) < 1e-11);
        CHECK(rel(special::beta_inc_complement(a, b, x), bm::ibetac(a, b, x)) < 1e-11);
      }
  CHECK(rel(special::log_gamma(0.3), bm::lgamma(0.3)) < 1e-14);
  CHECK(rel(special::log_gamma(1234.5), bm::lgamma(1234.5)) < 1e-14);
  CHECK(special::normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-14));
  CHECK(rel(special::normal_sf(9.0), bm::cdf(bm::complement(bm::normal(), 9.0))) < 1e-12);
  CHECK(special::log_two_cosh(800.0) == doctest::Approx(800.0));
  CHECK(special::log_two_cosh(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("central families match Boost") {
  check_against(DistSpec::normal(1.5, 2.0), bm::normal(1.5, 2.0), {-3.0, 0.0, 1.5, 6.0}, 1e-12);
  check_against(DistSpec::gamma(2.5, 3.0), bm::gamma_distribution<>(2.5, 1.0 / 3.0), {0.05, 0.8, 4.0}, 1e-11);
  check_against(DistSpec::chi_square(4), bm::chi_squared(4), {0.1, 3.0, 9.49, 30.0}, 1e-11);
  check_against(DistSpec::student_t(3), bm::students_t(3), {-5.0, -0.4, 0.0, 2.35, 40.0}, 1e-11);
  check_against(DistSpec::student_t(29), bm::students_t(29), {-2.0, 1.0, 3.0}, 1e-11);
  check_against(DistSpec::fisher_f(3, 17), bm::fisher_f(3, 17), {0.05, 1.0, 3.2, 15.0}, 1e-11);
}

TEST_CASE("noncentral families match Boost") {
  check_against(DistSpec::noncentral_chi_square(3, 4.5), bm::non_central_chi_squared(3, 4.5), {0.5, 4.0, 20.0},
                1e-9);
  check_against(DistSpec::noncentral_chi_square(1, 40.0), bm::non_central_chi_squared(1, 40.0), {10.0, 40.0, 90.0},
                1e-9);
  check_against(DistSpec::noncentral_f(2, 15, 6.0), bm::non_central_f(2, 15, 6.0), {0.3, 2.5, 9.0}, 1e-9);
}

TEST_CASE("scaled law") {
  const DistSpec d = DistSpec::chi_square(1).scaled(0.5);
  CHECK(cdf(d, 1.0) == doctest::Approx(bm::cdf(bm::chi_squared(1), 2.0)).epsilon(1e-13));
  CHECK(pdf(d, 1.0) == doctest::Approx(2.0 * bm::pdf(bm::chi_squared(1), 2.0)).epsilon(1e-13));
  CHECK(quantile(d, 0.95) == doctest::Approx(0.5 * bm::quantile(bm::chi_squared(1), 0.95)).epsilon(1e-10));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(DistSpec::chi_square(-1.0), Error);
  CHECK_THROWS_AS(DistSpec::normal(0.0, 0.0), Error);
  CHECK_THROWS_AS(quantile(DistSpec::normal(0, 1), 1.5), Error);
}

TEST_CASE("sampling moments") {
  RngStream rng(42, 0);
  const std::size_t k = 200000;
  for (const DistSpec& d : {DistSpec::gamma(0.4, 2.0), DistSpec::chi_square(5), DistSpec::noncentral_chi_square(2, 3),
                            DistSpec::noncentral_f(3, 30, 2.0), DistSpec::student_t(8)}) {
    const auto xs = sample(d, rng, k);
    double m = 0, m2 = 0;
    for (double x : xs) m += x, m2 += x * x;
    m /= k;
    const double sd = std::sqrt(m2 / k - m * m);
    CAPTURE(d.describe());
    CHECK(std::abs(m - mean(d)) < 5.0 * sd / std::sqrt(double(k)));
  }
}

TEST_CASE("streams are reproducible") {
  RngStream a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 10; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
  }
  CHECK(substream(1, 2) != substream(2, 1));
}
