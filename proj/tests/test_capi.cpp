#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "bfequiv/bfequiv.h"

namespace {

const char* kConfig =
    "problem.kind = OneSidedExpFamily\n"
    "problem.n = 4\n"
    "prior.kind = PointMass\n"
    "prior.location = 1\n"
    "run.alpha = 0.05\n"
    "run.seed = 1\n"
    "run.N = 10000\n";

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(bfe_status_name(BFE_OK)) == "ok");
  CHECK(std::string(bfe_status_name(BFE_ERR_CLASS_VIOLATION)) == "class_violation");
  CHECK(std::string(bfe_version()).size() > 0);
}

TEST_CASE("config and problem handles") {
  bfe_config* cfg = nullptr;
  REQUIRE(bfe_config_parse_string(kConfig, &cfg) == BFE_OK);
  bfe_problem* p = nullptr;
  REQUIRE(bfe_problem_create(cfg, &p) == BFE_OK);
  double g1 = 0, g2 = 0, lam = 0;
  REQUIRE(bfe_problem_calibrate_alpha(p, 0.05, &g1, &g2, &lam) == BFE_OK);
  CHECK(g2 == doctest::Approx(3.289707).epsilon(1e-6));
  CHECK(g1 == g2);
  double log_bf = 0;
  REQUIRE(bfe_problem_log_bf_at(p, g2, &log_bf) == BFE_OK);
  CHECK(log_bf == doctest::Approx(std::log(lam)).epsilon(1e-12));
  double alpha = 0;
  REQUIRE(bfe_problem_implied_alpha(p, 3.632, &g1, &g2, &alpha) == BFE_OK);
  CHECK(alpha == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(bfe_problem_calibrate_alpha(p, 1.5, &g1, &g2, &lam) == BFE_ERR_PARAMETER_DOMAIN);
  CHECK(std::string(bfe_last_error()).find("alpha") != std::string::npos);
  bfe_problem_free(p);
  bfe_config_free(cfg);
}

TEST_CASE("config errors") {
  bfe_config* cfg = nullptr;
  CHECK(bfe_config_parse_string("problem.n = 4\ngarbage\n", &cfg) == BFE_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(bfe_last_error()).find(":2:") != std::string::npos);
  CHECK(bfe_config_parse_file("/nonexistent/x.cfg", &cfg) == BFE_ERR_IO);
  CHECK(bfe_config_parse_string(nullptr, &cfg) == BFE_ERR_INVALID_ARGUMENT);
  REQUIRE(bfe_config_parse_string("problem.kind = TwoSidedExpFamily\nproblem.n = 4\nprior.kind = Normal\nprior.mean = 1\n"
                                  "prior.precision = 1\n",
                                  &cfg) == BFE_OK);
  bfe_problem* p = nullptr;
  REQUIRE(bfe_problem_create(cfg, &p) == BFE_OK);
  double g1, g2, lam;
  CHECK(bfe_problem_calibrate_alpha(p, 0.05, &g1, &g2, &lam) == BFE_ERR_CLASS_VIOLATION);
  bfe_problem_free(p);
  bfe_config_free(cfg);
}

TEST_CASE("distribution handles") {
  const double df[] = {3.0};
  bfe_dist* d = nullptr;
  REQUIRE(bfe_dist_create("chi_square", df, 1, 1.0, &d) == BFE_OK);
  double v = 0;
  REQUIRE(bfe_dist_cdf(d, 7.814727903251178, &v) == BFE_OK);
  CHECK(v == doctest::Approx(0.95).epsilon(1e-12));
  REQUIRE(bfe_dist_quantile(d, 0.95, &v) == BFE_OK);
  CHECK(v == doctest::Approx(7.814727903251178).epsilon(1e-10));
  CHECK(bfe_dist_quantile(d, 2.0, &v) != BFE_OK);
  bfe_dist_free(d);
  CHECK(bfe_dist_create("chi_square", df, 2, 1.0, &d) == BFE_ERR_PARAMETER_DOMAIN);
  CHECK(bfe_dist_create("cauchy", df, 1, 1.0, &d) == BFE_ERR_PARAMETER_DOMAIN);
  const double np[] = {0.0, 2.0};
  REQUIRE(bfe_dist_create("normal", np, 2, 3.0, &d) == BFE_OK);
  REQUIRE(bfe_dist_sf(d, 6.0, &v) == BFE_OK);
  CHECK(v == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  bfe_dist_free(d);
}

TEST_CASE("run commands") {
  const auto out = std::filesystem::temp_directory_path() / "bfequiv_capi";
  std::filesystem::remove_all(out);
  bfe_config* cfg = nullptr;
  REQUIRE(bfe_config_parse_string(kConfig, &cfg) == BFE_OK);
  int code = -1;
  char* summary = nullptr;
  REQUIRE(bfe_run_command("verify", cfg, out.string().c_str(), &code, &summary) == BFE_OK);
  CHECK(code == 0);
  CHECK(std::string(summary) == "agreement 10000/10000");
  bfe_string_free(summary);
  CHECK(std::filesystem::exists(out / "verify.csv"));
  REQUIRE(bfe_config_set(cfg, "run.lambda", "2") == BFE_OK);
  REQUIRE(bfe_run_command("calibrate", cfg, out.string().c_str(), &code, nullptr) == BFE_OK);
  CHECK(code == 1);
  REQUIRE(bfe_run_command("reproduce-sec6", nullptr, out.string().c_str(), &code, nullptr) == BFE_OK);
  CHECK(code == 0);
  CHECK(std::filesystem::exists(out / "section6.csv"));
  bfe_config_free(cfg);
}
