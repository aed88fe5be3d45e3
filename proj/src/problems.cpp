#include "bfequiv/problems.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/roots.hpp"

namespace bfe {

namespace {

constexpr std::array<std::pair<ProblemKind, const char*>, 10> kKindNames{{
    {ProblemKind::OneSidedExpFamily, "OneSidedExpFamily"},
    {ProblemKind::TwoSidedExpFamily, "TwoSidedExpFamily"},
    {ProblemKind::GaussianMeanUnknownVar, "GaussianMeanUnknownVar"},
    {ProblemKind::RegressionKnownVar, "RegressionKnownVar"},
    {ProblemKind::RegressionUnknownVar, "RegressionUnknownVar"},
    {ProblemKind::TwoSampleMeansKnownVar, "TwoSampleMeansKnownVar"},
    {ProblemKind::TwoSampleMeansUnknownEqualVar, "TwoSampleMeansUnknownEqualVar"},
    {ProblemKind::VarianceRatio, "VarianceRatio"},
    {ProblemKind::SubsetSelection, "SubsetSelection"},
    {ProblemKind::SubjectiveVarianceEquality, "SubjectiveVarianceEquality"},
}};

template <class T>
const T& as(const Summary& s, const char* what) {
  const T* p = std::get_if<T>(&s);
  if (!p) fail(ErrorCode::Domain, std::string("summary does not belong to ") + what);
  return *p;
}

double sum(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double mean_of(const std::vector<double>& x) { return sum(x) / static_cast<double>(x.size()); }

double ss_about(const std::vector<double>& x, double centre) {
  double s = 0.0;
  for (double v : x) s += (v - centre) * (v - centre);
  return s;
}

std::vector<double> normal_sample(int n, double mu, double sd, RngStream& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = mu + sd * rng.normal();
  return x;
}

Eigen::VectorXd noise(int n, double sd, RngStream& rng) {
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e(i) = sd * rng.normal();
  return e;
}

void require_size(const std::vector<double>& x, int n, const char* what) {
  require(static_cast<int>(x.size()) == n, ErrorCode::Domain,
          std::string(what) + ": expected " + std::to_string(n) + " observations, got " + std::to_string(x.size()));
}

void require_response(const Eigen::VectorXd& y, int n) {
  require(y.size() == n, ErrorCode::Domain,
          "response length " + std::to_string(y.size()) + " does not match design rows " + std::to_string(n));
}

}  // namespace

const char* to_string(ProblemKind kind) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  fail(ErrorCode::Config, "unknown problem kind '" + name + "'");
}

CriticalRegion TestProblem::classical_region(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  const DistSpec law = null_law();
  if (region_shape() == RegionShape::UpperTail) return CriticalRegion::upper(quantile(law, 1.0 - alpha));
  return CriticalRegion::two_tail(quantile(law, 0.5 * alpha), quantile(law, 1.0 - 0.5 * alpha));
}

Interval TestProblem::statistic_support() const {
  const DistSpec law = null_law();
  return {law.support_lower(), std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------- exp family

ExpFamilyProblem::ExpFamilyProblem(bool two_sided, ExpFamilyModel model, double theta0, int n, Prior prior)
    : two_sided_(two_sided), model_(std::move(model)), theta0_(theta0), n_(n), prior_(std::move(prior)) {
  require(n_ >= 1, ErrorCode::ParameterDomain, "sample size must be positive");
  require(model_.domain().contains(theta0_), ErrorCode::ParameterDomain, "theta0 outside the natural parameter space");
  if (!two_sided_) {
    require(prior_.support().lo >= theta0_ || (prior_.is_point_mass() && prior_.location() > theta0_),
            ErrorCode::ParameterDomain, "one-sided prior must live on theta > theta0");
  }
}

std::string ExpFamilyProblem::describe() const {
  std::ostringstream os;
  os << (two_sided_ ? "two-sided" : "one-sided") << " test in " << model_.name() << ", theta0=" << theta0_
     << ", n=" << n_ << ", prior " << prior_.describe();
  return os.str();
}

Summary ExpFamilyProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n_, "exp-family sample");
  double t = 0.0;
  for (double x : data.x1) t += model_.d(x);
  return ScalarSummary{t, n_};
}

double ExpFamilyProblem::statistic(const Summary& s) const { return as<ScalarSummary>(s, "exp-family problem").t; }

DistSpec ExpFamilyProblem::null_law() const {
  auto law = model_.statistic_law(theta0_, n_);
  if (!law) fail(ErrorCode::Unsupported, "no exact null law for " + model_.name());
  return *law;
}

std::optional<AltLaw> ExpFamilyProblem::alt_law(double theta) const {
  auto law = model_.statistic_law(theta, n_);
  if (!law) return std::nullopt;
  return AltLaw{*law, LawTarget::Statistic};
}

Dataset ExpFamilyProblem::simulate(double theta, RngStream& rng) const {
  require(model_.has_sampler(), ErrorCode::Unsupported, "no sampler for " + model_.name());
  Dataset d;
  d.x1 = model_.sample(theta, n_, rng);
  return d;
}

BfValue ExpFamilyProblem::bayes_factor(const Summary& s) const { return bayes_factor_at(statistic(s)); }

BfValue ExpFamilyProblem::bayes_factor_at(double stat) const {
  return two_sided_ ? bf_two_sided(model_, prior_, theta0_, stat, n_) : bf_one_sided(model_, prior_, theta0_, stat, n_);
}

std::shared_ptr<ExpFamilyProblem> ExpFamilyProblem::with_prior(Prior prior) const {
  return std::make_shared<ExpFamilyProblem>(two_sided_, model_, theta0_, n_, std::move(prior));
}

// ---------------------------------------------------------------- t test

TTestProblem::TTestProblem(int n, double theta0, double sigma, SphericalDensity h)
    : n_(n), theta0_(theta0), sigma_(sigma), h_(std::move(h)) {
  require(n_ >= 2, ErrorCode::ParameterDomain, "t-test needs n >= 2");
  require(sigma_ > 0.0, ErrorCode::ParameterDomain, "sigma must be positive");
  require(h_.dim() == 1, ErrorCode::ParameterDomain, "t-test prior must be one-dimensional");
}

std::string TTestProblem::describe() const {
  std::ostringstream os;
  os << "normal mean, unknown variance, theta0=" << theta0_ << ", n=" << n_ << ", prior " << h_.describe();
  return os.str();
}

Summary TTestProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n_, "t-test sample");
  MeanSummary s;
  s.n = n_;
  s.mean = mean_of(data.x1) - theta0_;
  s.sum_sq = ss_about(data.x1, theta0_);
  const double centred = std::max(s.sum_sq - n_ * s.mean * s.mean, 0.0);
  require(centred > 0.0, ErrorCode::Degenerate, "sample has zero spread");
  s.sd = std::sqrt(centred / (n_ - 1.0));
  s.t_stat = std::sqrt(static_cast<double>(n_)) * s.mean / s.sd;
  return s;
}

double TTestProblem::statistic(const Summary& s) const { return as<MeanSummary>(s, "t-test problem").t_stat; }

std::optional<AltLaw> TTestProblem::alt_law(double theta) const {
  const double delta = (theta - theta0_) / sigma_;
  return AltLaw{DistSpec::noncentral_f(1.0, n_ - 1.0, n_ * delta * delta), LawTarget::SquaredStatistic};
}

Dataset TTestProblem::simulate(double theta, RngStream& rng) const {
  Dataset d;
  d.x1 = normal_sample(n_, theta, sigma_, rng);
  return d;
}

BfValue TTestProblem::bayes_factor(const Summary& s) const {
  const auto& m = as<MeanSummary>(s, "t-test problem");
  return bf_t_test(m.mean, m.sum_sq, n_, h_, method);
}

BfValue TTestProblem::bayes_factor_at(double stat) const { return bf_t_test_from_t(stat, n_, h_, method); }

CriticalRegion TTestProblem::classical_region(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  const double q = quantile(null_law(), 1.0 - 0.5 * alpha);
  return CriticalRegion::two_tail(-q, q);
}

// ---------------------------------------------------------------- regression

RegressionDesign::RegressionDesign(Eigen::MatrixXd x) : x_(std::move(x)), ortho_(orthonormalize(x_)) {
  require(x_.rows() > x_.cols(), ErrorCode::ParameterDomain, "regression needs more rows than columns");
}

Eigen::VectorXd RegressionDesign::mean_with_norm(double norm2) const {
  require(norm2 >= 0.0, ErrorCode::ParameterDomain, "noncentrality must be nonnegative");
  const Eigen::VectorXd delta = Eigen::VectorXd::Constant(p(), std::sqrt(norm2 / p()));
  return z() * delta;
}

RegressionKnownVarProblem::RegressionKnownVarProblem(Eigen::MatrixXd x, SphericalDensity h)
    : design_(std::move(x)), h_(std::move(h)) {
  require(h_.dim() == design_.p(), ErrorCode::ParameterDomain, "prior dimension must equal the number of columns");
}

std::string RegressionKnownVarProblem::describe() const {
  std::ostringstream os;
  os << "regression, unit variance, n=" << design_.n() << ", p=" << design_.p() << ", prior " << h_.describe();
  return os.str();
}

Summary RegressionKnownVarProblem::summarize(const Dataset& data) const {
  require_response(data.y, design_.n());
  RegressionSummary s;
  s.n = design_.n();
  s.p = design_.p();
  s.t_vec = design_.z().transpose() * data.y;
  s.t_norm2 = s.t_vec.squaredNorm();
  s.y_hat_y = s.t_norm2;
  s.y_y = data.y.squaredNorm();
  return s;
}

double RegressionKnownVarProblem::statistic(const Summary& s) const {
  return as<RegressionSummary>(s, "known-variance regression").t_norm2;
}

std::optional<AltLaw> RegressionKnownVarProblem::alt_law(double theta) const {
  return AltLaw{DistSpec::noncentral_chi_square(design_.p(), theta), LawTarget::Statistic};
}

Dataset RegressionKnownVarProblem::simulate(double theta, RngStream& rng) const {
  Dataset d;
  d.y = design_.mean_with_norm(theta) + noise(design_.n(), 1.0, rng);
  return d;
}

BfValue RegressionKnownVarProblem::bayes_factor(const Summary& s) const {
  const auto& r = as<RegressionSummary>(s, "known-variance regression");
  return bf_regression_known_var(std::span<const double>(r.t_vec.data(), static_cast<std::size_t>(r.t_vec.size())),
                                 h_, method);
}

BfValue RegressionKnownVarProblem::bayes_factor_at(double stat) const {
  return bf_regression_known_var_norm(stat, h_, method);
}

RegressionUnknownVarProblem::RegressionUnknownVarProblem(Eigen::MatrixXd x, SphericalDensity h, double sigma)
    : design_(std::move(x)), h_(std::move(h)), sigma_(sigma) {
  require(h_.dim() == design_.p(), ErrorCode::ParameterDomain, "prior dimension must equal the number of columns");
  require(sigma_ > 0.0, ErrorCode::ParameterDomain, "sigma must be positive");
}

std::string RegressionUnknownVarProblem::describe() const {
  std::ostringstream os;
  os << "regression, unknown variance, n=" << design_.n() << ", p=" << design_.p() << ", prior " << h_.describe();
  return os.str();
}

Summary RegressionUnknownVarProblem::summarize(const Dataset& data) const {
  require_response(data.y, design_.n());
  RegressionSummary s;
  s.n = design_.n();
  s.p = design_.p();
  s.t_vec = design_.z().transpose() * data.y;
  s.t_norm2 = s.t_vec.squaredNorm();
  s.y_hat_y = s.t_norm2;
  s.y_y = data.y.squaredNorm();
  require(s.y_y > s.y_hat_y, ErrorCode::Degenerate, "response lies in the column space");
  s.f_stat = f_from_ratio(s.y_hat_y / s.y_y, s.n, s.p);
  return s;
}

double RegressionUnknownVarProblem::statistic(const Summary& s) const {
  return as<RegressionSummary>(s, "unknown-variance regression").f_stat;
}

DistSpec RegressionUnknownVarProblem::null_law() const {
  return DistSpec::fisher_f(design_.p(), design_.n() - design_.p());
}

std::optional<AltLaw> RegressionUnknownVarProblem::alt_law(double theta) const {
  return AltLaw{DistSpec::noncentral_f(design_.p(), design_.n() - design_.p(), theta), LawTarget::Statistic};
}

Dataset RegressionUnknownVarProblem::simulate(double theta, RngStream& rng) const {
  Dataset d;
  d.y = design_.mean_with_norm(theta * sigma_ * sigma_) + noise(design_.n(), sigma_, rng);
  return d;
}

BfValue RegressionUnknownVarProblem::bayes_factor(const Summary& s) const {
  const auto& r = as<RegressionSummary>(s, "unknown-variance regression");
  return bf_regression_unknown_var(r.y_hat_y, r.y_y, r.n, r.p, h_, method);
}

BfValue RegressionUnknownVarProblem::bayes_factor_at(double stat) const {
  const double ratio = ratio_from_f(stat, design_.n(), design_.p());
  return bf_regression_unknown_var(ratio, 1.0, design_.n(), design_.p(), h_, method);
}

// ---------------------------------------------------------------- two samples, known variances

TwoSampleKnownVarProblem::TwoSampleKnownVarProblem(int n1, int n2, double tau1, double tau2, double c)
    : n1_(n1), n2_(n2), tau1_(tau1), tau2_(tau2), c_(c) {
  require(n1_ >= 1 && n2_ >= 1, ErrorCode::ParameterDomain, "sample sizes must be positive");
  require(tau1_ > 0.0 && tau2_ > 0.0, ErrorCode::ParameterDomain, "precisions must be positive");
  require(c_ > 0.0, ErrorCode::ParameterDomain, "prior scale c must be positive");
}

std::string TwoSampleKnownVarProblem::describe() const {
  std::ostringstream os;
  os << "two normal means, known precisions " << tau1_ << "/" << tau2_ << ", n1=" << n1_ << ", n2=" << n2_;
  return os.str();
}

std::string TwoSampleKnownVarProblem::prior_description() const {
  return "conjugate normal prior on the mean difference, c=" + std::to_string(c_);
}

double TwoSampleKnownVarProblem::difference_variance() const { return 1.0 / (n1_ * tau1_) + 1.0 / (n2_ * tau2_); }

Summary TwoSampleKnownVarProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n1_, "first sample");
  require_size(data.x2, n2_, "second sample");
  TwoSampleSummary s;
  s.n1 = n1_;
  s.n2 = n2_;
  s.mean1 = mean_of(data.x1);
  s.mean2 = mean_of(data.x2);
  s.ss1 = ss_about(data.x1, s.mean1);
  s.ss2 = ss_about(data.x2, s.mean2);
  return s;
}

double TwoSampleKnownVarProblem::statistic(const Summary& s) const {
  const auto& t = as<TwoSampleSummary>(s, "two-sample known-variance problem");
  return (t.mean1 - t.mean2) * (t.mean1 - t.mean2);
}

DistSpec TwoSampleKnownVarProblem::null_law() const { return DistSpec::chi_square(1.0).scaled(difference_variance()); }

std::optional<AltLaw> TwoSampleKnownVarProblem::alt_law(double theta) const {
  const double v = difference_variance();
  return AltLaw{DistSpec::noncentral_chi_square(1.0, theta * theta / v).scaled(v), LawTarget::Statistic};
}

Dataset TwoSampleKnownVarProblem::simulate(double theta, RngStream& rng) const {
  Dataset d;
  d.x1 = normal_sample(n1_, theta, 1.0 / std::sqrt(tau1_), rng);
  d.x2 = normal_sample(n2_, 0.0, 1.0 / std::sqrt(tau2_), rng);
  return d;
}

BfValue TwoSampleKnownVarProblem::bayes_factor(const Summary& s) const {
  const auto& t = as<TwoSampleSummary>(s, "two-sample known-variance problem");
  return bf_two_sample_means_known_var(t.mean1, t.mean2, n1_, n2_, tau1_, tau2_, c_);
}

BfValue TwoSampleKnownVarProblem::bayes_factor_at(double stat) const {
  require(stat >= 0.0, ErrorCode::Domain, "squared mean difference must be nonnegative");
  return bf_two_sample_means_known_var(std::sqrt(stat), 0.0, n1_, n2_, tau1_, tau2_, c_);
}

std::shared_ptr<TwoSampleKnownVarProblem> TwoSampleKnownVarProblem::with_c(double c) const {
  return std::make_shared<TwoSampleKnownVarProblem>(n1_, n2_, tau1_, tau2_, c);
}

// ---------------------------------------------------------------- two samples, common unknown variance

TwoSampleTProblem::TwoSampleTProblem(int n1, int n2, double c, double sigma)
    : n1_(n1), n2_(n2), c_(c), sigma_(sigma) {
  require(n1_ >= 2 && n2_ >= 2, ErrorCode::ParameterDomain, "each sample needs at least two observations");
  require(c_ > 0.0, ErrorCode::ParameterDomain, "prior scale c must be positive");
  require(sigma_ > 0.0, ErrorCode::ParameterDomain, "sigma must be positive");
}

std::string TwoSampleTProblem::describe() const {
  std::ostringstream os;
  os << "two normal means, common unknown variance, n1=" << n1_ << ", n2=" << n2_;
  return os.str();
}

std::string TwoSampleTProblem::prior_description() const {
  return "conjugate normal prior on the mean difference, c=" + std::to_string(c_);
}

Summary TwoSampleTProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n1_, "first sample");
  require_size(data.x2, n2_, "second sample");
  TwoSampleSummary s;
  s.n1 = n1_;
  s.n2 = n2_;
  s.mean1 = mean_of(data.x1);
  s.mean2 = mean_of(data.x2);
  s.ss1 = ss_about(data.x1, s.mean1);
  s.ss2 = ss_about(data.x2, s.mean2);
  require(s.ss1 + s.ss2 > 0.0, ErrorCode::Degenerate, "samples have zero spread");
  return s;
}

double TwoSampleTProblem::statistic(const Summary& s) const {
  const auto& t = as<TwoSampleSummary>(s, "two-sample t problem");
  return (t.mean2 - t.mean1) / std::sqrt(t.ss1 + t.ss2);
}

DistSpec TwoSampleTProblem::null_law() const {
  const double df = n1_ + n2_ - 2.0;
  return DistSpec::student_t(df).scaled(1.0 / std::sqrt(m() * df));
}

std::optional<AltLaw> TwoSampleTProblem::alt_law(double theta) const {
  const double df = n1_ + n2_ - 2.0;
  const double delta = theta / sigma_;
  return AltLaw{DistSpec::noncentral_f(1.0, df, m() * delta * delta).scaled(1.0 / (m() * df)),
                LawTarget::SquaredStatistic};
}

Dataset TwoSampleTProblem::simulate(double theta, RngStream& rng) const {
  Dataset d;
  d.x1 = normal_sample(n1_, 0.0, sigma_, rng);
  d.x2 = normal_sample(n2_, theta, sigma_, rng);
  return d;
}

BfValue TwoSampleTProblem::bayes_factor(const Summary& s) const {
  const auto& t = as<TwoSampleSummary>(s, "two-sample t problem");
  return bf_two_sample_t(t.mean1, t.mean2, t.ss1, t.ss2, n1_, n2_, c_);
}

BfValue TwoSampleTProblem::bayes_factor_at(double stat) const { return bf_two_sample_t_from_stat(stat, n1_, n2_, c_); }

CriticalRegion TwoSampleTProblem::classical_region(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  const double q = quantile(null_law(), 1.0 - 0.5 * alpha);
  return CriticalRegion::two_tail(-q, q);
}

std::shared_ptr<TwoSampleTProblem> TwoSampleTProblem::with_c(double c) const {
  return std::make_shared<TwoSampleTProblem>(n1_, n2_, c, sigma_);
}

// ---------------------------------------------------------------- variance ratio

VarianceRatioProblem::VarianceRatioProblem(int n1, int n2, bool means_known, Prior prior)
    : n1_(n1), n2_(n2), means_known_(means_known), prior_(std::move(prior)) {
  require(n1_ >= 2 && n2_ >= 2, ErrorCode::ParameterDomain, "each sample needs at least two observations");
  require(prior_.support().lo >= 1.0 || (prior_.is_point_mass() && prior_.location() > 1.0),
          ErrorCode::ParameterDomain, "variance-ratio prior must live on theta > 1");
}

std::string VarianceRatioProblem::describe() const {
  std::ostringstream os;
  os << "variance ratio, n1=" << n1_ << ", n2=" << n2_ << (means_known_ ? ", known means" : ", unknown means")
     << ", prior " << prior_.describe();
  return os.str();
}

Summary VarianceRatioProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n1_, "first sample");
  require_size(data.x2, n2_, "second sample");
  TwoSampleSummary s;
  s.n1 = n1_;
  s.n2 = n2_;
  s.mean1 = means_known_ ? 0.0 : mean_of(data.x1);
  s.mean2 = means_known_ ? 0.0 : mean_of(data.x2);
  s.ss1 = ss_about(data.x1, s.mean1);
  s.ss2 = ss_about(data.x2, s.mean2);
  require(s.ss2 > 0.0, ErrorCode::Degenerate, "second sample has zero spread");
  return s;
}

double VarianceRatioProblem::statistic(const Summary& s) const {
  const auto& t = as<TwoSampleSummary>(s, "variance-ratio problem");
  return t.ss1 / t.ss2;
}

DistSpec VarianceRatioProblem::null_law() const { return DistSpec::fisher_f(nu1(), nu2()).scaled(nu1() / nu2()); }

std::optional<AltLaw> VarianceRatioProblem::alt_law(double theta) const {
  return AltLaw{DistSpec::fisher_f(nu1(), nu2()).scaled(theta * nu1() / nu2()), LawTarget::Statistic};
}

Dataset VarianceRatioProblem::simulate(double theta, RngStream& rng) const {
  require(theta > 0.0, ErrorCode::ParameterDomain, "variance ratio must be positive");
  Dataset d;
  d.x1 = normal_sample(n1_, 0.0, std::sqrt(theta), rng);
  d.x2 = normal_sample(n2_, 0.0, 1.0, rng);
  return d;
}

BfValue VarianceRatioProblem::bayes_factor(const Summary& s) const { return bayes_factor_at(statistic(s)); }

BfValue VarianceRatioProblem::bayes_factor_at(double stat) const { return bf_variance_ratio(stat, nu1(), nu2(), prior_); }

// ---------------------------------------------------------------- subset selection

SubsetSelectionProblem::SubsetSelectionProblem(Eigen::MatrixXd x1, Eigen::MatrixXd x2, double c, double sigma)
    : x1_(std::move(x1)), x2_(std::move(x2)), c_(c), sigma_(sigma) {
  require(x1_.rows() == x2_.rows(), ErrorCode::Domain, "design blocks must have the same number of rows");
  require(x1_.cols() >= 1 && x2_.cols() >= 1, ErrorCode::ParameterDomain, "both design blocks need columns");
  require(n() > p1() + p2(), ErrorCode::ParameterDomain, "subset selection needs n > p1 + p2");
  require(c_ > 0.0, ErrorCode::ParameterDomain, "prior scale c must be positive");
  require(sigma_ > 0.0, ErrorCode::ParameterDomain, "sigma must be positive");
  reduced_ = orthonormalize(x1_);
  added_ = orthonormalize(residualize(x1_, x2_));
  beta2_dir_ = added_.z * Eigen::VectorXd::Constant(p2(), 1.0 / std::sqrt(static_cast<double>(p2())));
}

std::string SubsetSelectionProblem::describe() const {
  std::ostringstream os;
  os << "nested regression, n=" << n() << ", p1=" << p1() << ", p2=" << p2();
  return os.str();
}

std::string SubsetSelectionProblem::prior_description() const {
  return "g-prior on the added coefficients, c=" + std::to_string(c_);
}

Summary SubsetSelectionProblem::summarize(const Dataset& data) const {
  require_response(data.y, n());
  SubsetSummary s;
  s.n = n();
  s.p1 = p1();
  s.p2 = p2();
  const double yy = data.y.squaredNorm();
  const double fit1 = (reduced_.z.transpose() * data.y).squaredNorm();
  s.added_ss = (added_.z.transpose() * data.y).squaredNorm();
  s.reduced_rss = std::max(yy - fit1, 0.0);
  s.full_rss = std::max(s.reduced_rss - s.added_ss, 0.0);
  require(s.full_rss > 0.0, ErrorCode::Degenerate, "response lies in the full column space");
  s.t_ratio = s.added_ss / s.reduced_rss;
  s.f_stat = s.added_ss / s.full_rss;
  return s;
}

double SubsetSelectionProblem::statistic(const Summary& s) const {
  return as<SubsetSummary>(s, "subset-selection problem").f_stat;
}

DistSpec SubsetSelectionProblem::null_law() const {
  const double df2 = n() - p1() - p2();
  return DistSpec::fisher_f(p2(), df2).scaled(p2() / df2);
}

std::optional<AltLaw> SubsetSelectionProblem::alt_law(double theta) const {
  const double df2 = n() - p1() - p2();
  return AltLaw{DistSpec::noncentral_f(p2(), df2, theta).scaled(p2() / df2), LawTarget::Statistic};
}

Dataset SubsetSelectionProblem::simulate(double theta, RngStream& rng) const {
  require(theta >= 0.0, ErrorCode::ParameterDomain, "noncentrality must be nonnegative");
  Dataset d;
  d.y = x1_ * Eigen::VectorXd::Ones(p1()) + sigma_ * std::sqrt(theta) * beta2_dir_ + noise(n(), sigma_, rng);
  return d;
}

BfValue SubsetSelectionProblem::bayes_factor(const Summary& s) const {
  const auto& t = as<SubsetSummary>(s, "subset-selection problem");
  return bf_subset_selection_from_ratio(t.t_ratio, n(), p1(), p2(), c_);
}

BfValue SubsetSelectionProblem::bayes_factor_at(double stat) const {
  require(stat >= 0.0, ErrorCode::Domain, "F statistic must be nonnegative");
  return bf_subset_selection_from_ratio(stat / (1.0 + stat), n(), p1(), p2(), c_);
}

std::shared_ptr<SubsetSelectionProblem> SubsetSelectionProblem::with_c(double c) const {
  return std::make_shared<SubsetSelectionProblem>(x1_, x2_, c, sigma_);
}

// ---------------------------------------------------------------- subjective variance equality

SubjectiveVarianceProblem::SubjectiveVarianceProblem(int n1, int n2, NuisancePrior precision_prior, double sigma,
                                                     AltScale alt_scale)
    : n1_(n1), n2_(n2), nuisance_(precision_prior), sigma_(sigma), alt_scale_(alt_scale) {
  require(n1_ >= 1 && n2_ >= 1, ErrorCode::ParameterDomain, "sample sizes must be positive");
  require(nuisance_.kind == NuisanceKind::GammaPrec, ErrorCode::ParameterDomain,
          "subjective variance test needs a gamma precision prior");
  require(sigma_ > 0.0, ErrorCode::ParameterDomain, "sigma must be positive");
}

std::string SubjectiveVarianceProblem::describe() const {
  std::ostringstream os;
  os << "variance equality, known zero means, n1=" << n1_ << ", n2=" << n2_
     << (alt_scale_ == AltScale::Balanced ? ", balanced alternatives" : "");
  return os.str();
}

Summary SubjectiveVarianceProblem::summarize(const Dataset& data) const {
  require_size(data.x1, n1_, "first sample");
  require_size(data.x2, n2_, "second sample");
  SubjectiveSummary s;
  s.ss1 = ss_about(data.x1, 0.0);
  s.ss2 = ss_about(data.x2, 0.0);
  require(s.ss1 > 0.0 && s.ss2 > 0.0, ErrorCode::Degenerate, "sample has zero sum of squares");
  s.f = s.ss1 / s.ss2;
  s.q = nuisance_.b / (s.ss1 + s.ss2);
  s.t = t_from_f(s.f);
  return s;
}

double SubjectiveVarianceProblem::statistic(const Summary& s) const {
  return as<SubjectiveSummary>(s, "subjective variance problem").f;
}

DistSpec SubjectiveVarianceProblem::null_law() const {
  return DistSpec::fisher_f(n1_, n2_).scaled(static_cast<double>(n1_) / n2_);
}

std::optional<AltLaw> SubjectiveVarianceProblem::alt_law(double theta) const {
  return AltLaw{DistSpec::fisher_f(n1_, n2_).scaled(theta * n1_ / n2_), LawTarget::Statistic};
}

Dataset SubjectiveVarianceProblem::simulate(double theta, RngStream& rng) const {
  require(theta > 0.0, ErrorCode::ParameterDomain, "variance ratio must be positive");
  double sd1 = sigma_ * std::sqrt(theta), sd2 = sigma_;
  if (alt_scale_ == AltScale::Balanced) {
    sd1 = sigma_ * std::pow(theta, 0.25);
    sd2 = sigma_ * std::pow(theta, -0.25);
  }
  Dataset d;
  d.x1 = normal_sample(n1_, 0.0, sd1, rng);
  d.x2 = normal_sample(n2_, 0.0, sd2, rng);
  return d;
}

BfValue SubjectiveVarianceProblem::bayes_factor(const Summary& s) const {
  const auto& t = as<SubjectiveSummary>(s, "subjective variance problem");
  BfValue v;
  v.log_value = std::log(bf_subjective_variance(t.q, t.t));
  v.method = BfMethod::ClosedForm;
  return v;
}

BfValue SubjectiveVarianceProblem::bayes_factor_at(double) const {
  fail(ErrorCode::Unsupported, "subjective variance factor depends on the data through (Q, T), not F alone");
}

CriticalRegion SubjectiveVarianceProblem::classical_region(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  const DistSpec law = null_law();
  auto size = [&](double log_g) { return cdf(law, std::exp(-log_g)) + sf(law, std::exp(log_g)) - alpha; };
  require(size(0.0) > 0.0, ErrorCode::Infeasible, "alpha too large for a reciprocal region");
  const auto bracket = expand_bracket(
      size, 0.0, 1.0, [](double lo) { return lo; }, [](double hi) { return 2.0 * hi; }, 80);
  const auto root = solve_bracketed(size, bracket.lo, bracket.hi, 1e-14);
  return CriticalRegion::two_tail(std::exp(-root.x), std::exp(root.x));
}

// ----------------------------------------------------------------

std::shared_ptr<ExpFamilyProblem> paired_two_sided_problem(const ExpFamilyModel& model, double theta0, int n,
                                                           const Prior& base, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ParameterDomain, "alpha must lie in (0, 1)");
  const auto law = model.statistic_law(theta0, n);
  require(law.has_value(), ErrorCode::Unsupported, "no exact null law for " + model.name());
  const double g1 = quantile(*law, 0.5 * alpha), g2 = quantile(*law, 1.0 - 0.5 * alpha);
  auto pairing = std::make_shared<const PairingMap>(model, theta0, static_cast<double>(n), g1, g2);
  return std::make_shared<ExpFamilyProblem>(true, model, theta0, n, Prior::symmetric_paired(base, pairing));
}

Eigen::MatrixXd random_design(int n, int p, std::uint64_t seed, bool intercept) {
  require(n >= 1 && p >= 1, ErrorCode::ParameterDomain, "design dimensions must be positive");
  RngStream rng(seed, 0x5eed);
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = (intercept && j == 0) ? 1.0 : rng.normal();
  return x;
}

}  // namespace bfe
