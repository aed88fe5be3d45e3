#pragma once

#include <stdexcept>
#include <string>

namespace bfe {

enum class ErrorCode {
  ParameterDomain,
  Domain,
  NoSolution,
  NonConvergence,
  Degenerate,
  RankDeficient,
  ClassViolation,
  Infeasible,
  NumericalIntegrity,
  Unsupported,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace bfe
