#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "bfequiv/bfequiv.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 0;
};

int run(const std::string& command, const Options& opt, bool seed_given, bool workers_given) {
  bfe_config* cfg = nullptr;
  bfe_status st = opt.config.empty() ? bfe_config_parse_string("", &cfg) : bfe_config_parse_file(opt.config.c_str(), &cfg);
  if (st != BFE_OK) {
    std::cerr << "error: " << bfe_last_error() << "\n";
    return 1;
  }
  if (seed_given) bfe_config_set(cfg, "run.seed", std::to_string(opt.seed).c_str());
  if (workers_given) bfe_config_set(cfg, "run.workers", std::to_string(opt.workers).c_str());
  int exit_code = 0;
  char* summary = nullptr;
  st = bfe_run_command(command.c_str(), cfg, opt.out.c_str(), &exit_code, &summary);
  bfe_config_free(cfg);
  if (st != BFE_OK) {
    std::cerr << "error: " << bfe_last_error() << "\n";
    return 1;
  }
  if (summary) {
    (exit_code == 0 || exit_code == 4 ? std::cout : std::cerr) << summary << "\n";
    bfe_string_free(summary);
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes factor and classical test equivalence toolkit"};
  app.require_subcommand(1);
  Options opt;
  const char* commands[][2] = {
      {"calibrate", "match a Bayes threshold to a classical region"},
      {"power", "exact and Monte Carlo power curves"},
      {"verify", "decision agreement on simulated datasets"},
      {"dominance", "subjective versus classical power for equal variances"},
      {"johnson", "point-mass threshold test against the UMP test"},
      {"props", "run the structural property catalogue"},
      {"reproduce-sec6", "worked normal-mean example and lambda scaling"},
  };
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* c = sub->add_option("--config", opt.config, "config file (key=value)")->check(CLI::ExistingFile);
    if (std::string(name) != "reproduce-sec6" && std::string(name) != "props") c->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "random seed, overrides run.seed");
    sub->add_option("--workers", opt.workers, "worker threads, overrides run.workers")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    return run(sub->get_name(), opt, sub->count("--seed") > 0, sub->count("--workers") > 0);
  }
  return 1;
}
