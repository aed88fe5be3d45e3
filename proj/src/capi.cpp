#include "bfequiv/bfequiv.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "bfequiv/calibration.hpp"
#include "bfequiv/commands.hpp"
#include "bfequiv/distributions.hpp"
#include "bfequiv/run_config.hpp"

struct bfe_config {
  bfe::RunConfig cfg;
};

struct bfe_problem {
  bfe::ProblemPtr problem;
};

struct bfe_dist {
  bfe::DistSpec spec;
};

namespace {

thread_local std::string g_last_error;

bfe_status status_of(bfe::ErrorCode code) {
  switch (code) {
    case bfe::ErrorCode::ParameterDomain: return BFE_ERR_PARAMETER_DOMAIN;
    case bfe::ErrorCode::Domain: return BFE_ERR_DOMAIN;
    case bfe::ErrorCode::NoSolution: return BFE_ERR_NO_SOLUTION;
    case bfe::ErrorCode::NonConvergence: return BFE_ERR_NON_CONVERGENCE;
    case bfe::ErrorCode::Degenerate: return BFE_ERR_DEGENERATE;
    case bfe::ErrorCode::RankDeficient: return BFE_ERR_RANK_DEFICIENT;
    case bfe::ErrorCode::ClassViolation: return BFE_ERR_CLASS_VIOLATION;
    case bfe::ErrorCode::Infeasible: return BFE_ERR_INFEASIBLE;
    case bfe::ErrorCode::NumericalIntegrity: return BFE_ERR_NUMERICAL_INTEGRITY;
    case bfe::ErrorCode::Unsupported: return BFE_ERR_UNSUPPORTED;
    case bfe::ErrorCode::Config: return BFE_ERR_CONFIG;
    case bfe::ErrorCode::Io: return BFE_ERR_IO;
  }
  return BFE_ERR_INTERNAL;
}

template <class F>
bfe_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return BFE_OK;
  } catch (const bfe::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BFE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BFE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return BFE_ERR_INTERNAL;
  }
}

bfe_status invalid(const char* what) {
  g_last_error = what;
  return BFE_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bfe_status dist_eval(const bfe_dist* d, double x, double* out, double (*f)(const bfe::DistSpec&, double)) {
  if (!d || !out) return invalid("null argument");
  return guarded([&] { *out = f(d->spec, x); });
}

}  // namespace

extern "C" {

const char* bfe_version(void) { return "0.1.0"; }

const char* bfe_status_name(bfe_status status) {
  switch (status) {
    case BFE_OK: return "ok";
    case BFE_ERR_PARAMETER_DOMAIN: return "parameter_domain";
    case BFE_ERR_DOMAIN: return "domain";
    case BFE_ERR_NO_SOLUTION: return "no_solution";
    case BFE_ERR_NON_CONVERGENCE: return "non_convergence";
    case BFE_ERR_DEGENERATE: return "degenerate";
    case BFE_ERR_RANK_DEFICIENT: return "rank_deficient";
    case BFE_ERR_CLASS_VIOLATION: return "class_violation";
    case BFE_ERR_INFEASIBLE: return "infeasible";
    case BFE_ERR_NUMERICAL_INTEGRITY: return "numerical_integrity";
    case BFE_ERR_UNSUPPORTED: return "unsupported";
    case BFE_ERR_CONFIG: return "config";
    case BFE_ERR_IO: return "io";
    case BFE_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BFE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bfe_last_error(void) { return g_last_error.c_str(); }

bfe_status bfe_config_parse_file(const char* path, bfe_config** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new bfe_config{bfe::RunConfig::load(path)}; });
}

bfe_status bfe_config_parse_string(const char* text, bfe_config** out) {
  if (!text || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new bfe_config{bfe::RunConfig::parse(text)}; });
}

bfe_status bfe_config_set(bfe_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("null argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

void bfe_config_free(bfe_config* cfg) { delete cfg; }

bfe_status bfe_problem_create(const bfe_config* cfg, bfe_problem** out) {
  if (!cfg || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new bfe_problem{bfe::build_problem(cfg->cfg)}; });
}

void bfe_problem_free(bfe_problem* problem) { delete problem; }

bfe_status bfe_problem_log_bf_at(const bfe_problem* problem, double statistic, double* log_bf) {
  if (!problem || !log_bf) return invalid("null argument");
  return guarded([&] { *log_bf = problem->problem->bayes_factor_at(statistic).log_value; });
}

bfe_status bfe_problem_calibrate_alpha(const bfe_problem* problem, double alpha, double* gamma1, double* gamma2,
                                       double* lambda) {
  if (!problem || !gamma1 || !gamma2 || !lambda) return invalid("null argument");
  return guarded([&] {
    const auto res = bfe::calibrate_alpha(problem->problem, alpha);
    *gamma1 = res.rule.region.gamma1;
    *gamma2 = res.rule.region.gamma2;
    *lambda = res.rule.lambda;
  });
}

bfe_status bfe_problem_implied_alpha(const bfe_problem* problem, double lambda, double* gamma1, double* gamma2,
                                     double* alpha) {
  if (!problem || !gamma1 || !gamma2 || !alpha) return invalid("null argument");
  return guarded([&] {
    const auto res = bfe::calibrate_lambda(problem->problem, lambda);
    *gamma1 = res.rule.region.gamma1;
    *gamma2 = res.rule.region.gamma2;
    *alpha = res.rule.alpha;
  });
}

bfe_status bfe_dist_create(const char* family, const double* params, size_t nparams, double scale, bfe_dist** out) {
  if (!family || !out || (nparams > 0 && !params)) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string f = family;
    auto need = [&](size_t k) {
      if (nparams != k)
        bfe::fail(bfe::ErrorCode::ParameterDomain,
                  f + " takes " + std::to_string(k) + " parameters, got " + std::to_string(nparams));
    };
    bfe::DistSpec d;
    if (f == "normal") need(2), d = bfe::DistSpec::normal(params[0], params[1]);
    else if (f == "gamma") need(2), d = bfe::DistSpec::gamma(params[0], params[1]);
    else if (f == "chi_square") need(1), d = bfe::DistSpec::chi_square(params[0]);
    else if (f == "student_t") need(1), d = bfe::DistSpec::student_t(params[0]);
    else if (f == "fisher_f") need(2), d = bfe::DistSpec::fisher_f(params[0], params[1]);
    else if (f == "noncentral_f") need(3), d = bfe::DistSpec::noncentral_f(params[0], params[1], params[2]);
    else if (f == "noncentral_chi_square") need(2), d = bfe::DistSpec::noncentral_chi_square(params[0], params[1]);
    else bfe::fail(bfe::ErrorCode::ParameterDomain, "unknown distribution family '" + f + "'");
    if (scale != 1.0) d = d.scaled(scale);
    d.validate();
    *out = new bfe_dist{d};
  });
}

bfe_status bfe_dist_pdf(const bfe_dist* dist, double x, double* out) { return dist_eval(dist, x, out, bfe::pdf); }
bfe_status bfe_dist_cdf(const bfe_dist* dist, double x, double* out) { return dist_eval(dist, x, out, bfe::cdf); }
bfe_status bfe_dist_sf(const bfe_dist* dist, double x, double* out) { return dist_eval(dist, x, out, bfe::sf); }
bfe_status bfe_dist_quantile(const bfe_dist* dist, double p, double* out) {
  return dist_eval(dist, p, out, bfe::quantile);
}

void bfe_dist_free(bfe_dist* dist) { delete dist; }

bfe_status bfe_run_command(const char* command, const bfe_config* cfg, const char* out_dir, int* exit_code,
                           char** summary) {
  if (!command || !exit_code) return invalid("null argument");
  if (summary) *summary = nullptr;
  return guarded([&] {
    bfe::configure_logging();
    static const bfe::RunConfig empty;
    const bfe::RunConfig& c = cfg ? cfg->cfg : empty;
    std::filesystem::path dir;
    if (out_dir && *out_dir) dir = out_dir;
    else if (c.has("run.output_dir")) dir = c.get_path("run.output_dir");
    else dir = "bfequiv_out";
    const auto outcome = bfe::run_command(command, c, dir);
    *exit_code = outcome.exit_code;
    if (outcome.exit_code != bfe::kExitOk) g_last_error = outcome.summary;
    if (summary) *summary = copy_string(outcome.summary);
  });
}

void bfe_string_free(char* s) { std::free(s); }

}  // extern "C"
