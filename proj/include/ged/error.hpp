#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ged {

enum class ErrorCode {
  EmptyLog,
  UnparseableTimestamp,
  InvalidWindowSpec,
  InvalidParameter,
  WindowLargerThanSpan,
  EmptyGroup,
  FrameMismatch,
  NonConvergence,
  InfeasibleScript,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorCode::InvalidWindowSpec: return "InvalidWindowSpec";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::WindowLargerThanSpan: return "WindowLargerThanSpan";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InfeasibleScript: return "InfeasibleScript";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a code so that callers (the
// CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(ErrorCode::NonConvergence, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace ged
