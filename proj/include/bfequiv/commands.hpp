#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bfequiv/error.hpp"
#include "bfequiv/priors.hpp"
#include "bfequiv/problems.hpp"
#include "bfequiv/run_config.hpp"

namespace bfe {

enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitClassViolation = 3,
  kExitVerdictFailed = 4,
  kExitNumerical = 5,
};

int exit_status_for(ErrorCode code) noexcept;

struct CommandOutcome {
  int exit_code = kExitOk;
  std::string summary;
  std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& command_names();

// Problem and prior declared by the problem.* and prior.* keys.
ProblemPtr build_problem(const RunConfig& cfg);
Prior build_prior(const RunConfig& cfg, const std::string& prefix, double theta0);
SphericalDensity build_spherical(const RunConfig& cfg, const std::string& prefix, int dim);

// Runs one subcommand. Library errors map to exit codes; the outcome's summary
// then carries the message. Output files are written only on completion.
CommandOutcome run_command(const std::string& name, const RunConfig& cfg, const std::filesystem::path& out_dir);

// Applies BFEQUIV_LOG (error, info, debug) to the library logger.
void configure_logging();

}  // namespace bfe
