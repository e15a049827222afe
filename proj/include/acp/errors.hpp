#pragma once

#include <stdexcept>
#include <string>

namespace acp {

// Error taxonomy. Messages carry the specific condition (e.g. "workload
// exceeds cap", "missing column 'x_m'"); the type selects the broad class
// so callers can map to exit codes without string matching.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition or mathematical-domain violation (bad workload, frequency at
// or below the constraint pole, mismatched lengths, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent trace/CSV input, including schema mismatches.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver failed to meet its stopping band; indicates a bug, not bad input.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace acp
