#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bfequiv/error.hpp"
#include "bfequiv/report_io.hpp"
#include "bfequiv/run_config.hpp"

using namespace bfe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bfequiv_unit";
  fs::create_directories(dir);
  return dir / name;
}

std::string error_of(const std::string& text) {
  try {
    RunConfig::parse(text, "cfg");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("numbers use 12 significant digits and a dot") {
  CHECK(format_number(3.289707253902945) == "3.2897072539");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(-0.5) == "-0.5");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("csv table quoting and shape") {
  CsvTable t({"a", "b"});
  t.add_row({"1", "x,y"});
  CHECK(t.str() == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
}

TEST_CASE("csv reading") {
  const fs::path p = scratch("data.csv");
  {
    std::ofstream out(p);
    out << "x, y\n1,2\n# comment\n3.5,-4e2\n";
  }
  const CsvColumns c = read_csv(p);
  CHECK(c.rows() == 2);
  CHECK(c.column("y")[1] == -400.0);
  CHECK_THROWS_AS(c.column("z"), Error);
  {
    std::ofstream out(p);
    out << "x\n1\nabc\n";
  }
  try {
    read_csv(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  CHECK_THROWS_AS(read_csv(scratch("missing.csv")), Error);
}

TEST_CASE("atomic write leaves no temporary behind") {
  const fs::path p = scratch("out.txt");
  write_file_atomic(p, "hello\n");
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "hello\n");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic(scratch("no_such_dir") / "x" / "y.txt", "z"), Error);
}

TEST_CASE("svg plot has a fixed view box and one polyline per series") {
  const std::string svg = svg_line_plot("t", "x", "y", {{"a", {0, 1, 2}, {0, 0.5, 1}}, {"b", {0, 1}, {1, 0}}});
  CHECK(svg.find("viewBox=\"0 0 640 400\"") != std::string::npos);
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  CHECK(count == 2);
}

TEST_CASE("config parsing") {
  const RunConfig c = RunConfig::parse(
      "# header\nproblem.kind = OneSidedExpFamily  # trailing\nproblem.n=4\nrun.alpha = 0.05\nrun.grid = 0, 0.5,1\n"
      "run.N = 1e5\nrun.crn = false\n");
  CHECK(c.get_string("problem.kind") == "OneSidedExpFamily");
  CHECK(c.get_int("problem.n") == 4);
  CHECK(c.get_int("run.N") == 100000);
  CHECK(c.get_double("run.alpha") == 0.05);
  CHECK(c.get_list("run.grid") == std::vector<double>{0, 0.5, 1});
  CHECK_FALSE(c.get_bool("run.crn", true));
  CHECK(c.get_double("run.lambda", 2.0) == 2.0);
  CHECK_THROWS_AS(c.get_string("prior.kind"), Error);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("problem.n = 4\nnot a pair\n").find("cfg:2:") != std::string::npos);
  CHECK(error_of("problem.n = 4\n\nproblem.n = 5\n").find("cfg:3: duplicate") != std::string::npos);
  CHECK(error_of("alpha = 0.05\n").find("section prefix") != std::string::npos);
  CHECK(error_of("run.alpha =\n").find("cfg:1:") != std::string::npos);
  const RunConfig c = RunConfig::parse("run.alpha = 0.05\nrun.N = many\n", "cfg");
  try {
    c.get_int("run.N");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
  }
}

TEST_CASE("overrides and relative paths") {
  const fs::path p = scratch("c.cfg");
  {
    std::ofstream out(p);
    out << "problem.data = d.csv\nrun.seed = 3\n";
  }
  RunConfig c = RunConfig::load(p);
  CHECK(c.get_path("problem.data") == p.parent_path() / "d.csv");
  c.set("run.seed", "18446744073709551615");
  CHECK(c.get_u64("run.seed") == 18446744073709551615ull);
  CHECK_THROWS_AS(RunConfig::load(scratch("absent.cfg")), Error);
}
