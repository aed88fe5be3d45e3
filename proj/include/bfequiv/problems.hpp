#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bfequiv/bayes_factors.hpp"
#include "bfequiv/distributions.hpp"
#include "bfequiv/exp_family.hpp"
#include "bfequiv/linalg.hpp"
#include "bfequiv/priors.hpp"
#include "bfequiv/rng.hpp"

namespace bfe {

enum class ProblemKind {
  OneSidedExpFamily,
  TwoSidedExpFamily,
  GaussianMeanUnknownVar,
  RegressionKnownVar,
  RegressionUnknownVar,
  TwoSampleMeansKnownVar,
  TwoSampleMeansUnknownEqualVar,
  VarianceRatio,
  SubsetSelection,
  SubjectiveVarianceEquality,
};

const char* to_string(ProblemKind kind) noexcept;
ProblemKind problem_kind_from_string(const std::string& name);

enum class RegionShape { UpperTail, TwoTail };

// Classical critical region: {T > gamma2} for UpperTail, {T < gamma1 or T > gamma2}
// for TwoTail. Boundary values never reject.
struct CriticalRegion {
  RegionShape shape = RegionShape::UpperTail;
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  static CriticalRegion upper(double gamma) { return {RegionShape::UpperTail, gamma, gamma}; }
  static CriticalRegion two_tail(double lo, double hi) { return {RegionShape::TwoTail, lo, hi}; }
  bool rejects(double t) const noexcept {
    return shape == RegionShape::UpperTail ? t > gamma2 : (t < gamma1 || t > gamma2);
  }
};

// Sufficient summaries. Sums of squares are about the sample mean unless the
// problem treats means as known.
struct ScalarSummary {
  double t = 0.0;
  int n = 0;
};
struct MeanSummary {
  double mean = 0.0;    // of x - theta0
  double sum_sq = 0.0;  // Σ (x - theta0)²
  double sd = 0.0;      // sample standard deviation
  double t_stat = 0.0;
  int n = 0;
};
struct RegressionSummary {
  Eigen::VectorXd t_vec;  // Z'y
  double t_norm2 = 0.0;   // Σ T_j²
  double y_hat_y = 0.0;   // y'Hy
  double y_y = 0.0;
  double f_stat = 0.0;
  int n = 0;
  int p = 0;
};
struct TwoSampleSummary {
  double mean1 = 0.0, mean2 = 0.0;
  double ss1 = 0.0, ss2 = 0.0;
  int n1 = 0, n2 = 0;
};
struct SubsetSummary {
  double reduced_rss = 0.0;  // y'(I - H1)y
  double added_ss = 0.0;     // y'(H - H1)y
  double full_rss = 0.0;     // y'(I - H)y
  double t_ratio = 0.0;      // added / reduced
  double f_stat = 0.0;       // added / full
  int n = 0, p1 = 0, p2 = 0;
};
struct SubjectiveSummary {
  double ss1 = 0.0, ss2 = 0.0;  // Σ x² per sample (known zero means)
  double f = 0.0;
  double q = 0.0;  // b / (ss1 + ss2)
  double t = 0.0;  // 1/4 - F/(1+F)²
};
using Summary =
    std::variant<ScalarSummary, MeanSummary, RegressionSummary, TwoSampleSummary, SubsetSummary, SubjectiveSummary>;

// Raw observations: one or two samples, or a regression response.
struct Dataset {
  std::vector<double> x1;
  std::vector<double> x2;
  Eigen::VectorXd y;
};

enum class LawTarget { Statistic, SquaredStatistic };

// Law of the classical statistic (or of its square) under an alternative.
struct AltLaw {
  DistSpec law;
  LawTarget target = LawTarget::Statistic;
};

class TestProblem {
 public:
  virtual ~TestProblem() = default;

  virtual ProblemKind kind() const = 0;
  std::string id() const { return to_string(kind()); }
  virtual std::string describe() const = 0;
  virtual std::string prior_description() const = 0;
  virtual RegionShape region_shape() const = 0;
  // Null value of the scalar parameter that indexes power curves.
  virtual double theta0() const = 0;
  // Alternatives used for power grids, on one side of theta0.
  virtual Interval alternative_range() const = 0;

  virtual Summary summarize(const Dataset& data) const = 0;
  virtual double statistic(const Summary& s) const = 0;
  virtual DistSpec null_law() const = 0;
  virtual std::optional<AltLaw> alt_law(double theta) const = 0;
  virtual Dataset simulate(double theta, RngStream& rng) const = 0;

  virtual BfValue bayes_factor(const Summary& s) const = 0;
  // B as a function of the classical statistic alone, when the BF factors that way.
  virtual bool bf_is_function_of_statistic() const { return true; }
  virtual BfValue bayes_factor_at(double stat) const = 0;

  // Classical region of size alpha (equal tails for two-sided problems).
  virtual CriticalRegion classical_region(double alpha) const;
  virtual Interval statistic_support() const;
};

using ProblemPtr = std::shared_ptr<const TestProblem>;

class ExpFamilyProblem final : public TestProblem {
 public:
  ExpFamilyProblem(bool two_sided, ExpFamilyModel model, double theta0, int n, Prior prior);

  ProblemKind kind() const override {
    return two_sided_ ? ProblemKind::TwoSidedExpFamily : ProblemKind::OneSidedExpFamily;
  }
  std::string describe() const override;
  std::string prior_description() const override { return prior_.describe(); }
  RegionShape region_shape() const override { return two_sided_ ? RegionShape::TwoTail : RegionShape::UpperTail; }
  double theta0() const override { return theta0_; }
  Interval alternative_range() const override { return {theta0_, model_.domain().hi}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  const ExpFamilyModel& model() const noexcept { return model_; }
  const Prior& prior() const noexcept { return prior_; }
  int n() const noexcept { return n_; }
  std::shared_ptr<ExpFamilyProblem> with_prior(Prior prior) const;

 private:
  bool two_sided_;
  ExpFamilyModel model_;
  double theta0_;
  int n_;
  Prior prior_;
};

class TTestProblem final : public TestProblem {
 public:
  TTestProblem(int n, double theta0, double sigma, SphericalDensity h);

  ProblemKind kind() const override { return ProblemKind::GaussianMeanUnknownVar; }
  std::string describe() const override;
  std::string prior_description() const override { return h_.describe(); }
  RegionShape region_shape() const override { return RegionShape::TwoTail; }
  double theta0() const override { return theta0_; }
  Interval alternative_range() const override { return {theta0_, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override { return DistSpec::student_t(n_ - 1.0); }
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;
  CriticalRegion classical_region(double alpha) const override;

  int n() const noexcept { return n_; }
  const SphericalDensity& prior() const noexcept { return h_; }
  BfMethod method = BfMethod::CoshSeries;

 private:
  int n_;
  double theta0_;
  double sigma_;
  SphericalDensity h_;
};

// Shared design handling for the two regression problems.
class RegressionDesign {
 public:
  explicit RegressionDesign(Eigen::MatrixXd x);
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::MatrixXd& z() const noexcept { return ortho_.z; }
  const Eigen::MatrixXd& q() const noexcept { return ortho_.q; }
  int n() const noexcept { return static_cast<int>(x_.rows()); }
  int p() const noexcept { return static_cast<int>(x_.cols()); }
  // Mean vector Zδ with δ'δ = norm2 along a fixed direction.
  Eigen::VectorXd mean_with_norm(double norm2) const;

 private:
  Eigen::MatrixXd x_;
  Orthonormalized ortho_;
};

class RegressionKnownVarProblem final : public TestProblem {
 public:
  RegressionKnownVarProblem(Eigen::MatrixXd x, SphericalDensity h);

  ProblemKind kind() const override { return ProblemKind::RegressionKnownVar; }
  std::string describe() const override;
  std::string prior_description() const override { return h_.describe(); }
  RegionShape region_shape() const override { return RegionShape::UpperTail; }
  double theta0() const override { return 0.0; }
  Interval alternative_range() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override { return DistSpec::chi_square(design_.p()); }
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  const RegressionDesign& design() const noexcept { return design_; }
  BfMethod method = BfMethod::CoshSeries;

 private:
  RegressionDesign design_;
  SphericalDensity h_;
};

class RegressionUnknownVarProblem final : public TestProblem {
 public:
  RegressionUnknownVarProblem(Eigen::MatrixXd x, SphericalDensity h, double sigma);

  ProblemKind kind() const override { return ProblemKind::RegressionUnknownVar; }
  std::string describe() const override;
  std::string prior_description() const override { return h_.describe(); }
  RegionShape region_shape() const override { return RegionShape::UpperTail; }
  double theta0() const override { return 0.0; }
  Interval alternative_range() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  const RegressionDesign& design() const noexcept { return design_; }
  BfMethod method = BfMethod::CoshSeries;

 private:
  RegressionDesign design_;
  SphericalDensity h_;
  double sigma_;
};

class TwoSampleKnownVarProblem final : public TestProblem {
 public:
  TwoSampleKnownVarProblem(int n1, int n2, double tau1, double tau2, double c);

  ProblemKind kind() const override { return ProblemKind::TwoSampleMeansKnownVar; }
  std::string describe() const override;
  std::string prior_description() const override;
  RegionShape region_shape() const override { return RegionShape::UpperTail; }
  double theta0() const override { return 0.0; }
  Interval alternative_range() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  KnownVarConstants constants() const { return two_sample_known_var_constants(n1_, n2_, tau1_, tau2_, c_); }
  std::shared_ptr<TwoSampleKnownVarProblem> with_c(double c) const;

 private:
  double difference_variance() const;
  int n1_, n2_;
  double tau1_, tau2_, c_;
};

class TwoSampleTProblem final : public TestProblem {
 public:
  TwoSampleTProblem(int n1, int n2, double c, double sigma);

  ProblemKind kind() const override { return ProblemKind::TwoSampleMeansUnknownEqualVar; }
  std::string describe() const override;
  std::string prior_description() const override;
  RegionShape region_shape() const override { return RegionShape::TwoTail; }
  double theta0() const override { return 0.0; }
  Interval alternative_range() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;
  CriticalRegion classical_region(double alpha) const override;

  TwoSampleTConstants constants() const { return two_sample_t_constants(n1_, n2_, c_); }
  std::shared_ptr<TwoSampleTProblem> with_c(double c) const;

 private:
  double m() const { return static_cast<double>(n1_) * n2_ / (n1_ + n2_); }
  int n1_, n2_;
  double c_, sigma_;
};

class VarianceRatioProblem final : public TestProblem {
 public:
  VarianceRatioProblem(int n1, int n2, bool means_known, Prior prior);

  ProblemKind kind() const override { return ProblemKind::VarianceRatio; }
  std::string describe() const override;
  std::string prior_description() const override { return prior_.describe(); }
  RegionShape region_shape() const override { return RegionShape::UpperTail; }
  double theta0() const override { return 1.0; }
  Interval alternative_range() const override { return {1.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  double nu1() const { return means_known_ ? n1_ : n1_ - 1.0; }
  double nu2() const { return means_known_ ? n2_ : n2_ - 1.0; }
  const Prior& prior() const noexcept { return prior_; }

 private:
  int n1_, n2_;
  bool means_known_;
  Prior prior_;
};

class SubsetSelectionProblem final : public TestProblem {
 public:
  SubsetSelectionProblem(Eigen::MatrixXd x1, Eigen::MatrixXd x2, double c, double sigma);

  ProblemKind kind() const override { return ProblemKind::SubsetSelection; }
  std::string describe() const override;
  std::string prior_description() const override;
  RegionShape region_shape() const override { return RegionShape::UpperTail; }
  double theta0() const override { return 0.0; }
  Interval alternative_range() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  BfValue bayes_factor(const Summary& s) const override;
  BfValue bayes_factor_at(double stat) const override;

  const Eigen::MatrixXd& x1() const noexcept { return x1_; }
  const Eigen::MatrixXd& x2() const noexcept { return x2_; }
  double c() const noexcept { return c_; }
  std::shared_ptr<SubsetSelectionProblem> with_c(double c) const;

 private:
  int n() const { return static_cast<int>(x1_.rows()); }
  int p1() const { return static_cast<int>(x1_.cols()); }
  int p2() const { return static_cast<int>(x2_.cols()); }
  Eigen::MatrixXd x1_, x2_;
  double c_, sigma_;
  Orthonormalized reduced_;   // span(X1)
  Orthonormalized added_;     // span((I - H1) X2)
  Eigen::VectorXd beta2_dir_;  // unit-noncentrality direction for β2
};

// How the nuisance scale moves under the alternative θ = σ1²/σ2².
enum class AltScale { Reference, Balanced };

class SubjectiveVarianceProblem final : public TestProblem {
 public:
  SubjectiveVarianceProblem(int n1, int n2, NuisancePrior precision_prior, double sigma, AltScale alt_scale);

  ProblemKind kind() const override { return ProblemKind::SubjectiveVarianceEquality; }
  std::string describe() const override;
  std::string prior_description() const override { return nuisance_.describe(); }
  RegionShape region_shape() const override { return RegionShape::TwoTail; }
  double theta0() const override { return 1.0; }
  Interval alternative_range() const override { return {1.0, std::numeric_limits<double>::infinity()}; }
  Summary summarize(const Dataset& data) const override;
  // Classical statistic F = S1²/S2².
  double statistic(const Summary& s) const override;
  DistSpec null_law() const override;
  std::optional<AltLaw> alt_law(double theta) const override;
  Dataset simulate(double theta, RngStream& rng) const override;
  // B*(Q, T); not a function of F alone.
  BfValue bayes_factor(const Summary& s) const override;
  bool bf_is_function_of_statistic() const override { return false; }
  BfValue bayes_factor_at(double stat) const override;
  // Region with gamma1 * gamma2 = 1 and total size alpha.
  CriticalRegion classical_region(double alpha) const override;

  // T = 1/4 - F/(1+F)², the statistic the subjective factor is monotone in.
  static double t_from_f(double f) { return 0.25 - f / ((1.0 + f) * (1.0 + f)); }
  double b() const noexcept { return nuisance_.b; }
  double a() const noexcept { return nuisance_.a; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }

 private:
  int n1_, n2_;
  NuisancePrior nuisance_;
  double sigma_;
  AltScale alt_scale_;
};

// Two-sided exp-family problem whose prior is `base` (on θ > θ0) made symmetric
// through the pairing map of the equal-tail size-alpha region.
std::shared_ptr<ExpFamilyProblem> paired_two_sided_problem(const ExpFamilyModel& model, double theta0, int n,
                                                           const Prior& base, double alpha);

// Random n x p design with iid standard normal entries (first column ones when intercept).
Eigen::MatrixXd random_design(int n, int p, std::uint64_t seed, bool intercept = false);

}  // namespace bfe
