#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stylesplit {

// Category of a failure, used by the CLI to choose exit codes and by the
// error JSON it prints.
enum class ErrorKind { input, parameter, solver, unsupported, validation };

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::solver: return "solver";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed or too-short input text.
struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::parameter, what) {}
};

// The relaxation solver hit its iteration cap. `best` holds the best
// rounded flip assignment found before giving up.
struct SolverError : Error {
  SolverError(const std::string& what, std::vector<int> best_so_far)
      : Error(ErrorKind::solver, what), best(std::move(best_so_far)) {}
  std::vector<int> best;
};

// Label alignment for more than two clusterings of more than two authors.
struct UnsupportedCaseError : Error {
  explicit UnsupportedCaseError(const std::string& what)
      : Error(ErrorKind::unsupported, what) {}
};

// A stage artifact is missing a field or has the wrong shape.
struct ValidationError : Error {
  ValidationError(const std::string& field_name, const std::string& what)
      : Error(ErrorKind::validation, field_name + ": " + what),
        field(field_name) {}
  std::string field;
};

}  // namespace stylesplit
