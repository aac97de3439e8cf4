#pragma once

#include <stdexcept>
#include <string>

namespace specedge {

// Error taxonomy shared by the library and the CLI. The numeric value of each
// kind is the process exit code the CLI maps it to, so that scripts can tell
// "bad input" (2, 3) from "the numerics gave up" (4) from "the math disagrees" (5).
enum class ErrorKind : int {
  config = 2,        // malformed flags, grids, files
  model = 3,         // model invalid at some index, domain/precondition violations
  numeric = 4,       // non-convergence, interval collapse, pole proximity
  verification = 5,  // a verification verdict of FAIL
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

struct ModelError : Error {
  explicit ModelError(const std::string& w) : Error(ErrorKind::model, w) {}
};

// A mathematical-domain violation (argument outside the range where the
// quantity is defined). A sub-kind of model validity for exit purposes.
struct DomainError : ModelError {
  explicit DomainError(const std::string& w) : ModelError(w) {}
};

// Requested integral/sum provably diverges (not a numerical failure).
struct DivergenceError : DomainError {
  explicit DivergenceError(const std::string& w) : DomainError(w) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};

// Both mantissas of a scaled solution vanished: the trivial solution.
struct DegenerateSolutionError : ModelError {
  explicit DegenerateSolutionError(const std::string& w) : ModelError(w) {}
};

struct VerificationError : Error {
  explicit VerificationError(const std::string& w) : Error(ErrorKind::verification, w) {}
};

}  // namespace specedge
