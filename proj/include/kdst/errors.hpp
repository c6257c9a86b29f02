#pragma once

#include <stdexcept>
#include <string>

namespace kdst {

// Exit codes shared between the library error types and the CLI.
enum class ExitCode : int {
  Ok = 0,
  Failure = 1,     // generic failure (solver trouble, rounding gave up, ...)
  Infeasible = 2,  // instance cannot satisfy the connectivity requirement
  ResourceCap = 3, // a size guard tripped (path blow-up, oracle too large)
  Config = 4,      // malformed input or invalid parameters
};

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what, ExitCode code = ExitCode::Failure)
      : std::runtime_error(what), code_(code) {}
  ExitCode exit_code() const noexcept { return code_; }

private:
  ExitCode code_;
};

// Malformed instance/spec text.
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(w, ExitCode::Config) {}
};

// Structurally invalid data (negative cost, root listed as terminal, ...).
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(w, ExitCode::Config) {}
};

// Bad CLI/experiment parameters.
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(w, ExitCode::Config) {}
};

// The instance (or an LP derived from it) cannot meet the requirement.
struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& w) : Error(w, ExitCode::Infeasible) {}
};

// A configurable size cap was exceeded.
struct ResourceCapError : Error {
  explicit ResourceCapError(const std::string& w) : Error(w, ExitCode::ResourceCap) {}
};

// The LP solver could not certify a result (iteration limit, numerics).
struct SolverError : Error {
  explicit SolverError(const std::string& w) : Error(w, ExitCode::Failure) {}
};

// Randomized rounding exhausted its restart budget.
struct RoundingError : Error {
  explicit RoundingError(const std::string& w) : Error(w, ExitCode::Failure) {}
};

} // namespace kdst
