#include "bfequiv/error.hpp"

namespace bfe {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParameterDomain: return "parameter-domain";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::NoSolution: return "no-solution";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::Degenerate: return "degenerate-data";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::ClassViolation: return "class-violation";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::NumericalIntegrity: return "numerical-integrity";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bfe
