#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bfequiv/calibration.hpp"

namespace bfe {

struct PowerCurve {
  std::vector<double> theta;
  std::vector<double> power;
  std::vector<double> se;  // zero for exact curves
  std::vector<std::size_t> rejections;
  std::string method;
  double alpha = 0.0;
  std::size_t n_mc = 0;  // 0 for exact curves
};

// Requires an exact alternative law; throws Unsupported otherwise.
PowerCurve exact_power(const DecisionRule& rule, std::span<const double> grid);

enum class RuleSide { Bayes, Classical };

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t n = 100000;
  int workers = 1;
};

PowerCurve mc_power(const DecisionRule& rule, std::span<const double> grid, const McOptions& opt, RuleSide side);

// Both decisions on the same simulated datasets (or on independent streams when
// `independent` is set). `mismatches[k]` counts datasets at grid point k where
// {B > λ} and {T in C} disagree; it is only meaningful under common numbers.
struct CrnComparison {
  PowerCurve bayes;
  PowerCurve classical;
  std::vector<std::size_t> mismatches;
  bool independent = false;
  bool identical() const;
};

CrnComparison compare_power(const DecisionRule& rule, std::span<const double> grid, const McOptions& opt,
                            bool independent = false);

// Equally spaced θ from θ0 to where the classical test reaches `top_power`.
std::vector<double> default_grid(const DecisionRule& rule, int points = 21, double top_power = 0.99);
// θ0 plus alternatives at classical power roughly 0.3, 0.6, 0.9.
std::vector<double> default_verify_thetas(const DecisionRule& rule);

struct DominanceOptions {
  double alpha = 0.05;
  McOptions mc{1, 1000000, 1};
  int max_probes = 20;
  double bridge_tolerance = 1e-9;
};

struct DominanceReport {
  std::vector<double> theta;
  std::vector<double> power_subjective, se_subjective;
  std::vector<double> power_classical, se_classical;
  double max_violation = 0.0;  // max of (subjective - classical) / combined se
  bool verdict = false;        // subjective <= classical + 3 se everywhere

  // size calibration under θ = 1
  double lambda = 0.0;
  double size_subjective = 0.0, se_size_subjective = 0.0;
  double size_classical = 0.0, se_size_classical = 0.0;
  int probes = 0;
  bool size_calibrated = false;
  CriticalRegion classical_region;

  // bridge: classical threshold on the T scale against the B*(0, ·) image of λ
  double gamma_t = 0.0;
  double lambda_tilde = 0.0;
  bool bridge_holds = false;

  // hypothesis conditions on a 100 x 100 (Q, T) grid
  bool q_bound_holds = false;
  bool monotone_in_t = false;
};

DominanceReport dominance_study(const std::shared_ptr<const SubjectiveVarianceProblem>& problem,
                                std::span<const double> grid, const DominanceOptions& opt);

struct JohnsonRow {
  double theta = 0.0;
  double power_johnson = 0.0, se_johnson = 0.0;
  double power_reference = 0.0, se_reference = 0.0;
  double power_ump = 0.0;
};

struct JohnsonReport {
  JohnsonThreshold threshold;
  double lambda = 0.0;
  double alpha = 0.0;
  // {B > λ} under the point mass at θ*, before recalibration
  CriticalRegion raw_region;
  double raw_implied_alpha = 0.0;
  double recalibrated_lambda = 0.0;
  CriticalRegion region;
  std::string reference_prior;
  std::vector<JohnsonRow> rows;
  double max_gap_se = 0.0;  // largest |Johnson - UMP| in units of se
  bool verdict = false;
};

JohnsonReport johnson_comparison(const ExpFamilyModel& model, double theta0, int n, double lambda, double alpha,
                                 const Prior& reference, std::span<const double> grid, const McOptions& opt);

}  // namespace bfe
