#pragma once

#include <stdexcept>
#include <string>

namespace dyndim {

// Error categories map onto process exit codes in the CLI:
// validation/domain errors -> 2, budget exhaustion -> 3, broken internal
// invariants -> 4.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg, int code) : std::runtime_error(msg), exit_code(code) {}
  int exit_code;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg, 2) {}
};

// Carries a serialized best-so-far payload so interrupted searches still
// report partial results.
struct BudgetError : Error {
  explicit BudgetError(const std::string& msg, std::string partial_json = "")
      : Error(msg, 3), partial(std::move(partial_json)) {}
  std::string partial;
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg) : Error(msg, 4) {}
};

}  // namespace dyndim
