#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bfequiv/commands.hpp"
#include "bfequiv/report_io.hpp"

using namespace bfe;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bfequiv_cmd" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kOneSided =
    "problem.kind = OneSidedExpFamily\nproblem.model = normal\nproblem.n = 4\n"
    "prior.kind = PointMass\nprior.location = 1\n";

}  // namespace

TEST_CASE("calibrate writes one row with the threshold") {
  const fs::path out = fresh_dir("cal");
  const auto r = run_command("calibrate", RunConfig::parse(std::string(kOneSided) + "run.alpha = 0.05\n"), out);
  CHECK(r.exit_code == kExitOk);
  std::ifstream in(out / "calibration.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header.rfind("problem,input,alpha,gamma1,gamma2,lambda,prior", 0) == 0);
  CHECK(row.find(",3.2897072539,") != std::string::npos);
}

TEST_CASE("calibrate from lambda reports the implied size") {
  const fs::path out = fresh_dir("cal_lambda");
  const auto r = run_command("calibrate", RunConfig::parse(std::string(kOneSided) + "run.lambda = 3.632\n"), out);
  CHECK(r.exit_code == kExitOk);
  CHECK(slurp(out / "calibration.csv").find("lambda,0.0499960703") != std::string::npos);
}

TEST_CASE("exit codes") {
  SUBCASE("both alpha and lambda") {
    const auto r = run_command("calibrate", RunConfig::parse(std::string(kOneSided) + "run.alpha = 0.05\nrun.lambda = 2\n"),
                               fresh_dir("both"));
    CHECK(r.exit_code == kExitConfig);
  }
  SUBCASE("class violation writes nothing") {
    const fs::path out = fresh_dir("violation");
    const auto r = run_command("calibrate",
                               RunConfig::parse("problem.kind = TwoSidedExpFamily\nproblem.n = 4\nprior.kind = Normal\n"
                                                "prior.mean = 0.7\nprior.precision = 1\nrun.alpha = 0.05\n"),
                               out);
    CHECK(r.exit_code == kExitClassViolation);
    CHECK(r.summary.find("B(gamma1)") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "calibration.csv"));
  }
  SUBCASE("infeasible lambda") {
    const auto r = run_command("calibrate",
                               RunConfig::parse("problem.kind = TwoSidedExpFamily\nproblem.n = 4\nprior.kind = Normal\n"
                                                "prior.mean = 0\nprior.precision = 1\nrun.lambda = 0.1\n"),
                               fresh_dir("infeasible"));
    CHECK(r.exit_code == kExitInfeasible);
  }
  SUBCASE("missing data file") {
    const auto r = run_command(
        "calibrate",
        RunConfig::parse(std::string(kOneSided) + "run.alpha = 0.05\nproblem.data = /nonexistent/data.csv\n"),
        fresh_dir("nodata"));
    CHECK(r.exit_code == kExitConfig);
  }
  SUBCASE("seed is mandatory for Monte Carlo") {
    const auto r = run_command("verify", RunConfig::parse(std::string(kOneSided) + "run.alpha = 0.05\n"), fresh_dir("noseed"));
    CHECK(r.exit_code == kExitConfig);
    CHECK(r.summary.find("run.seed") != std::string::npos);
  }
  SUBCASE("unknown subcommand and prior") {
    CHECK(run_command("frobnicate", RunConfig{}, fresh_dir("unknown")).exit_code == kExitConfig);
    CHECK(run_command("calibrate",
                      RunConfig::parse("problem.kind = OneSidedExpFamily\nproblem.n = 4\nprior.kind = Uniform\nrun.alpha = 0.05\n"),
                      fresh_dir("badprior"))
              .exit_code == kExitConfig);
  }
}

TEST_CASE("verify and power outputs are byte-identical on rerun") {
  const std::string cfg = std::string(kOneSided) + "run.alpha = 0.05\nrun.seed = 5\nrun.N = 20000\nrun.grid_points = 6\n";
  const fs::path a = fresh_dir("rep_a"), b = fresh_dir("rep_b"), c = fresh_dir("rep_c");
  const auto ra = run_command("power", RunConfig::parse(cfg), a);
  const auto rb = run_command("power", RunConfig::parse(cfg), b);
  const auto rc = run_command("power", RunConfig::parse(cfg + "run.workers = 3\n"), c);
  CHECK(ra.exit_code == kExitOk);
  CHECK(slurp(a / "power.csv") == slurp(b / "power.csv"));
  CHECK(slurp(a / "power.csv") == slurp(c / "power.csv"));
  CHECK(slurp(a / "power.csv").rfind("theta,power,se,method,alpha,N\n", 0) == 0);
  CHECK(fs::exists(a / "power.svg"));
  const auto v = run_command("verify", RunConfig::parse(cfg), a);
  CHECK(v.summary == "agreement 20000/20000");
  CHECK(v.exit_code == kExitOk);
}

TEST_CASE("observed data through a CSV file") {
  const fs::path dir = fresh_dir("observed");
  fs::create_directories(dir);
  {
    std::ofstream d(dir / "two.csv");
    d << "sample,x\n1,0.3\n1,1.1\n1,-0.2\n2,2.0\n2,1.4\n2,2.6\n";
  }
  const auto r = run_command(
      "calibrate",
      RunConfig::parse("problem.kind = TwoSampleMeansUnknownEqualVar\nproblem.n1 = 3\nproblem.n2 = 3\nrun.alpha = 0.05\n"
                       "problem.data = " + (dir / "two.csv").string() + "\n"),
      dir / "out");
  CHECK(r.exit_code == kExitOk);
  CHECK(fs::exists(dir / "out" / "observed.csv"));
}

TEST_CASE("worked example table") {
  const fs::path out = fresh_dir("sec6");
  const auto r = run_command("reproduce-sec6", RunConfig{}, out);
  CHECK(r.exit_code == kExitOk);
  const CsvColumns t = read_csv(out / "section6.csv");
  CHECK(t.column("n_over_tau") == std::vector<double>{100, 10000});
  CHECK(t.column("B_exact")[1] == doctest::Approx(1.483).epsilon(0.005));
  const CsvColumns f = read_csv(out / "lambda_scaling_fit.csv");
  CHECK(std::abs(f.column("slope")[0] + 0.5) < 0.02);
}

TEST_CASE("props subcommand on a subset") {
  const fs::path out = fresh_dir("props");
  const auto r = run_command(
      "props", RunConfig::parse("run.trials = 3\nrun.properties = monotone_one_sided_normal, regression_f_monotone\n"), out);
  CHECK(r.exit_code == kExitOk);
  CHECK(slurp(out / "props_transcript.txt").find("PASS monotone_one_sided_normal 3/3") != std::string::npos);
  CHECK(run_command("props", RunConfig::parse("run.properties = nope\n"), out).exit_code == kExitConfig);
}
