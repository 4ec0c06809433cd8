#pragma once

#include <stdexcept>
#include <string>

namespace disclin {

// Bad user input: invalid parameter values, malformed configs, unreadable
// input files. Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-finite energies, failed line searches, degree
// computations that cannot certify an integer. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace disclin
