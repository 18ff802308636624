#pragma once

#include <stdexcept>
#include <string>

namespace otrepair {

// Bad input: malformed files, violated preconditions, inconsistent shapes.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a result (root not bracketed,
// non-finite iterate, infeasible coupling).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace otrepair
