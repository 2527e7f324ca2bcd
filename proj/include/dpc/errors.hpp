#pragma once

#include <stdexcept>
#include <string>

namespace dpc {

// Precondition violations: bad parameters, empty sets, mismatched sizes.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// File and format problems.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown that cannot be reported as a partial result.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpc
