#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bfequiv/problems.hpp"

namespace bfe {

// Reject when B > lambda, equivalently when the statistic falls in the region.
struct DecisionRule {
  CriticalRegion region;
  double lambda = 1.0;
  double alpha = 0.05;
  ProblemPtr problem;

  double log_lambda() const { return std::log(lambda); }
  bool bayes_rejects(const Summary& s) const { return problem->bayes_factor(s).log_value > std::log(lambda); }
  bool classical_rejects(const Summary& s) const { return region.rejects(problem->statistic(s)); }
};

struct CalibrationDiagnostics {
  double quantile_residual = 0.0;   // |P(T in C) - alpha|
  double endpoint_mismatch = 0.0;   // |B(γ1) - B(γ2)| / λ, two-sided only
  double root_residual = 0.0;       // |B(γ) - λ| / λ after inversion
  double bf_rel_error = 0.0;        // largest quadrature error bound seen
  int iterations = 0;
};

struct CalibrationResult {
  DecisionRule rule;
  CalibrationDiagnostics diagnostics;
};

enum class TwoSidedMode { EqualTails, EqualBayesFactor };

CriticalRegion gamma_from_alpha(const TestProblem& p, double alpha);

// λ = B(γ1); for two-sided regions B(γ2) must agree to 1e-8 relative, otherwise
// ClassViolation naming both values.
double lambda_from_gamma(const TestProblem& p, const CriticalRegion& region, CalibrationDiagnostics* diag = nullptr);

inline constexpr double kEndpointTolerance = 1e-8;

enum class Feasibility { Ok, AlwaysReject, NeverReject };
const char* to_string(Feasibility f) noexcept;

struct InversionResult {
  Feasibility status = Feasibility::Ok;
  CriticalRegion region;
  double implied_alpha = 0.0;
  CalibrationDiagnostics diagnostics;
  double bf_min = 0.0;  // min/inf of B over the statistic support (two-sided vertex)
};

// Inverts B(t) = λ on the statistic's support. A λ below the infimum of B makes
// every dataset reject; a λ above the supremum makes the region empty. Both are
// reported through `status` rather than thrown.
InversionResult gamma_from_lambda(const TestProblem& p, double lambda);

double region_size(const TestProblem& p, const CriticalRegion& region);

CalibrationResult calibrate_alpha(const ProblemPtr& p, double alpha, TwoSidedMode mode = TwoSidedMode::EqualTails);
// Throws Infeasible when λ is outside the range of B.
CalibrationResult calibrate_lambda(const ProblemPtr& p, double lambda);

struct Disagreement {
  std::size_t index = 0;
  double theta = 0.0;
  double statistic = 0.0;
  double log_bf = 0.0;
  bool classical = false;
  bool bayes = false;
  std::string data;
};

struct AgreementReport {
  std::size_t total = 0;
  std::size_t agree = 0;
  std::size_t rejections_classical = 0;
  std::size_t rejections_bayes = 0;
  std::size_t evaluation_errors = 0;
  std::vector<Disagreement> disagreements;  // first few, with dataset dumps
  std::string first_error;
  bool all_agree() const { return agree == total && evaluation_errors == 0; }
};

// Dataset i is simulated at thetas[i % thetas.size()] from substream (seed, i / chunk).
AgreementReport verify_equivalence(const DecisionRule& rule, std::span<const double> thetas, std::uint64_t seed,
                                   std::size_t n, int workers, std::size_t max_dumps = 20);

std::string dump_dataset(const Dataset& d);

}  // namespace bfe
