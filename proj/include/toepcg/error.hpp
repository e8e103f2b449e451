#pragma once

#include <stdexcept>
#include <string>

namespace toepcg {

enum class ErrorCode {
  kDomain,            // argument outside the mathematical domain
  kPole,              // evaluation on a singularity
  kShape,             // vector/matrix dimensions disagree
  kSize,              // memory budget exceeded
  kSingular,          // zero pivot in a dense factorization
  kNotSymmetric,
  kParameter,         // inconsistent construction parameters
  kPositivity,        // preconditioner symbol not positive
  kDegenerate,        // stencil or rank-one correction degenerate
  kIndefinite,        // non-positive curvature in a Krylov recurrence
  kBreakdown,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace toepcg
