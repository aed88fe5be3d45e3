#include "bfequiv/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/parallel.hpp"
#include "bfequiv/roots.hpp"

namespace bfe {

namespace {

constexpr int kMaxExpansions = 100;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogBf {
  const TestProblem& p;
  double log_lambda;
  mutable double worst_error = 0.0;
  mutable int calls = 0;

  double operator()(double t) const {
    const BfValue v = p.bayes_factor_at(t);
    worst_error = std::max(worst_error, v.rel_error);
    ++calls;
    return v.log_value - log_lambda;
  }
};

double spread(const DistSpec& law) {
  const double s = quantile(law, 0.75) - quantile(law, 0.25);
  return s > 0.0 ? s : 1.0;
}

double x_tol_near(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

// Searches from `start` away in direction `dir` (+1/-1) for a point where
// f has sign `want` (+1 above, -1 below zero). Respects a finite support edge.
std::optional<double> search(const LogBf& f, double start, double step, int dir, int want, double edge) {
  for (int k = 0; k < kMaxExpansions; ++k) {
    double t = start + dir * step * std::ldexp(1.0, k);
    bool at_edge = false;
    if (std::isfinite(edge) && (dir < 0 ? t <= edge : t >= edge)) {
      t = edge;
      at_edge = true;
    }
    const double v = f(t);
    if ((want > 0 && v > 0.0) || (want < 0 && v < 0.0)) return t;
    if (at_edge) return std::nullopt;
  }
  return std::nullopt;
}

double solve_side(const LogBf& f, double a, double b) {
  const auto r = solve_bracketed(std::cref(f), std::min(a, b), std::max(a, b), x_tol_near(0.5 * (a + b)));
  return r.x;
}

}  // namespace

const char* to_string(Feasibility f) noexcept {
  switch (f) {
    case Feasibility::Ok: return "ok";
    case Feasibility::AlwaysReject: return "always-reject";
    case Feasibility::NeverReject: return "never-reject";
  }
  return "?";
}

CriticalRegion gamma_from_alpha(const TestProblem& p, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  return p.classical_region(alpha);
}

double region_size(const TestProblem& p, const CriticalRegion& region) {
  const DistSpec law = p.null_law();
  if (region.shape == RegionShape::UpperTail) return sf(law, region.gamma2);
  return cdf(law, region.gamma1) + sf(law, region.gamma2);
}

double lambda_from_gamma(const TestProblem& p, const CriticalRegion& region, CalibrationDiagnostics* diag) {
  require(p.bf_is_function_of_statistic(), ErrorCode::Unsupported,
          "Bayes factor of " + p.id() + " is not a function of the classical statistic");
  if (region.shape == RegionShape::UpperTail) {
    const BfValue b = p.bayes_factor_at(region.gamma2);
    if (diag) diag->bf_rel_error = std::max(diag->bf_rel_error, b.rel_error);
    return b.value();
  }
  require(region.gamma1 < region.gamma2, ErrorCode::Domain, "two-sided region needs gamma1 < gamma2");
  const BfValue b1 = p.bayes_factor_at(region.gamma1);
  const BfValue b2 = p.bayes_factor_at(region.gamma2);
  const double mismatch = std::abs(std::expm1(b2.log_value - b1.log_value));
  if (diag) {
    diag->endpoint_mismatch = mismatch;
    diag->bf_rel_error = std::max({diag->bf_rel_error, b1.rel_error, b2.rel_error});
  }
  if (mismatch > kEndpointTolerance) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "prior is not paired for this region: B(gamma1)=%.12g at gamma1=%.12g, B(gamma2)=%.12g at "
                  "gamma2=%.12g (relative gap %.3g)",
                  b1.value(), region.gamma1, b2.value(), region.gamma2, mismatch);
    fail(ErrorCode::ClassViolation, buf);
  }
  return b1.value();
}

InversionResult gamma_from_lambda(const TestProblem& p, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::ParameterDomain, "lambda must be positive and finite");
  require(p.bf_is_function_of_statistic(), ErrorCode::Unsupported,
          "Bayes factor of " + p.id() + " is not a function of the classical statistic");
  const DistSpec law = p.null_law();
  const Interval support = p.statistic_support();
  const double mid = quantile(law, 0.5);
  const double step = spread(law);
  LogBf f{p, std::log(lambda)};
  InversionResult out;

  if (p.region_shape() == RegionShape::UpperTail) {
    out.region = CriticalRegion::upper(mid);
    if (std::isfinite(support.lo) && f(support.lo) >= 0.0) {
      out.status = Feasibility::AlwaysReject;
      out.region = CriticalRegion::upper(support.lo);
      out.implied_alpha = 1.0;
      out.bf_min = std::exp(f(support.lo) + f.log_lambda);
      return out;
    }
    double below = mid, above = mid;
    const double at_mid = f(mid);
    if (at_mid < 0.0) {
      auto hi = search(f, mid, step, +1, +1, support.hi);
      if (!hi) {
        out.status = Feasibility::NeverReject;
        out.region = CriticalRegion::upper(kInf);
        out.implied_alpha = 0.0;
        return out;
      }
      above = *hi;
    } else {
      auto lo = search(f, mid, step, -1, -1, support.lo);
      if (!lo) {
        out.status = Feasibility::AlwaysReject;
        out.region = CriticalRegion::upper(support.lo);
        out.implied_alpha = 1.0;
        return out;
      }
      below = *lo;
    }
    const double g = solve_side(f, below, above);
    out.region = CriticalRegion::upper(g);
    out.implied_alpha = sf(law, g);
    out.diagnostics.root_residual = std::abs(std::expm1(f(g)));
  } else {
    const double lo_q = std::max(quantile(law, 1e-9), support.lo);
    const double hi_q = quantile(law, 1.0 - 1e-9);
    const auto vertex = golden_minimize(std::cref(f), lo_q, hi_q, 1e-10 * step);
    out.bf_min = std::exp(vertex.value + f.log_lambda);
    if (vertex.value >= 0.0) {
      out.status = Feasibility::AlwaysReject;
      out.region = CriticalRegion::two_tail(vertex.x, vertex.x);
      out.implied_alpha = 1.0;
      return out;
    }
    auto left = search(f, vertex.x, step, -1, +1, support.lo);
    auto right = search(f, vertex.x, step, +1, +1, support.hi);
    if (!left && !right) {
      out.status = Feasibility::NeverReject;
      out.region = CriticalRegion::two_tail(-kInf, kInf);
      out.implied_alpha = 0.0;
      return out;
    }
    const double g1 = left ? solve_side(f, *left, vertex.x) : -kInf;
    const double g2 = right ? solve_side(f, vertex.x, *right) : kInf;
    out.region = CriticalRegion::two_tail(g1, g2);
    out.implied_alpha = (left ? cdf(law, g1) : 0.0) + (right ? sf(law, g2) : 0.0);
    double resid = 0.0;
    if (left) resid = std::max(resid, std::abs(std::expm1(f(g1))));
    if (right) resid = std::max(resid, std::abs(std::expm1(f(g2))));
    out.diagnostics.root_residual = resid;
  }
  out.diagnostics.iterations = f.calls;
  out.diagnostics.bf_rel_error = f.worst_error;
  return out;
}

CalibrationResult calibrate_alpha(const ProblemPtr& p, double alpha, TwoSidedMode mode) {
  require(p != nullptr, ErrorCode::Domain, "no problem given");
  CalibrationResult res;
  res.rule.problem = p;
  res.rule.alpha = alpha;
  if (mode == TwoSidedMode::EqualBayesFactor && p->region_shape() == RegionShape::TwoTail) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
    // Implied size decreases in λ; search on log λ above the vertex of B.
    const InversionResult probe = gamma_from_lambda(*p, 1.0);
    const double log_min = std::log(probe.bf_min > 0.0 ? probe.bf_min : 1.0);
    int calls = 0;
    auto excess = [&](double log_gap) {
      ++calls;
      const auto inv = gamma_from_lambda(*p, std::exp(log_min + std::exp(log_gap)));
      return inv.implied_alpha - alpha;
    };
    double lo = -30.0, hi = 0.0;
    while (excess(hi) > 0.0) {
      lo = hi;
      hi += 1.0;
      require(hi < 10.0, ErrorCode::Infeasible, "no equal-B region reaches the requested size");
    }
    require(excess(lo) > 0.0, ErrorCode::Infeasible, "requested size exceeds what an equal-B region can reach");
    const auto root = solve_bracketed(excess, lo, hi, 1e-13);
    const double lambda = std::exp(log_min + std::exp(root.x));
    const auto inv = gamma_from_lambda(*p, lambda);
    res.rule.region = inv.region;
    res.rule.lambda = lambda;
    res.diagnostics = inv.diagnostics;
    res.diagnostics.iterations += calls;
    res.diagnostics.quantile_residual = std::abs(inv.implied_alpha - alpha);
    return res;
  }
  res.rule.region = gamma_from_alpha(*p, alpha);
  res.diagnostics.quantile_residual = std::abs(region_size(*p, res.rule.region) - alpha);
  if (p->bf_is_function_of_statistic()) {
    res.rule.lambda = lambda_from_gamma(*p, res.rule.region, &res.diagnostics);
    const double back = p->region_shape() == RegionShape::UpperTail
                            ? p->bayes_factor_at(res.rule.region.gamma2).value()
                            : p->bayes_factor_at(res.rule.region.gamma1).value();
    res.diagnostics.root_residual = std::abs(back / res.rule.lambda - 1.0);
  } else {
    res.rule.lambda = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

CalibrationResult calibrate_lambda(const ProblemPtr& p, double lambda) {
  require(p != nullptr, ErrorCode::Domain, "no problem given");
  const InversionResult inv = gamma_from_lambda(*p, lambda);
  if (inv.status != Feasibility::Ok) {
    std::ostringstream os;
    os.precision(12);
    os << "lambda=" << lambda << " is outside the range of B for " << p->id() << ": "
       << (inv.status == Feasibility::AlwaysReject ? "every dataset rejects (implied alpha 1)"
                                                   : "rejection region is empty (implied alpha 0)");
    fail(ErrorCode::Infeasible, os.str());
  }
  CalibrationResult res;
  res.rule.problem = p;
  res.rule.region = inv.region;
  res.rule.lambda = lambda;
  res.rule.alpha = inv.implied_alpha;
  res.diagnostics = inv.diagnostics;
  return res;
}

std::string dump_dataset(const Dataset& d) {
  std::ostringstream os;
  os.precision(17);
  auto list = [&](const char* name, auto begin, auto end) {
    os << name << "=[";
    for (auto it = begin; it != end; ++it) os << (it == begin ? "" : " ") << *it;
    os << "]";
  };
  bool any = false;
  if (!d.x1.empty()) {
    list("x1", d.x1.begin(), d.x1.end());
    any = true;
  }
  if (!d.x2.empty()) {
    if (any) os << ";";
    list("x2", d.x2.begin(), d.x2.end());
    any = true;
  }
  if (d.y.size() > 0) {
    if (any) os << ";";
    list("y", d.y.data(), d.y.data() + d.y.size());
  }
  return os.str();
}

AgreementReport verify_equivalence(const DecisionRule& rule, std::span<const double> thetas, std::uint64_t seed,
                                   std::size_t n, int workers, std::size_t max_dumps) {
  require(rule.problem != nullptr, ErrorCode::Domain, "decision rule has no problem");
  require(!thetas.empty(), ErrorCode::ParameterDomain, "need at least one parameter value");
  const TestProblem& p = *rule.problem;
  const double log_lambda = rule.log_lambda();
  const std::size_t chunks = chunk_count(n);
  std::vector<AgreementReport> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    RngStream rng(seed, substream(0x7e41f, c));
    AgreementReport& r = parts[c];
    const std::size_t begin = c * kMcChunk, end = std::min(n, begin + kMcChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const double theta = thetas[i % thetas.size()];
      const Dataset data = p.simulate(theta, rng);
      ++r.total;
      try {
        const Summary s = p.summarize(data);
        const double t = p.statistic(s);
        const double lb = p.bayes_factor(s).log_value;
        const bool classical = rule.region.rejects(t);
        const bool bayes = lb > log_lambda;
        r.rejections_classical += classical;
        r.rejections_bayes += bayes;
        if (classical == bayes) {
          ++r.agree;
        } else if (r.disagreements.size() < max_dumps) {
          r.disagreements.push_back({i, theta, t, lb, classical, bayes, dump_dataset(data)});
        }
      } catch (const Error& e) {
        if (r.evaluation_errors++ == 0) r.first_error = "dataset " + std::to_string(i) + ": " + e.what();
      }
    }
  });
  AgreementReport total;
  for (auto& r : parts) {
    total.total += r.total;
    total.agree += r.agree;
    total.rejections_classical += r.rejections_classical;
    total.rejections_bayes += r.rejections_bayes;
    total.evaluation_errors += r.evaluation_errors;
    if (total.first_error.empty()) total.first_error = r.first_error;
    for (auto& d : r.disagreements)
      if (total.disagreements.size() < max_dumps) total.disagreements.push_back(std::move(d));
  }
  return total;
}

}  // namespace bfe
