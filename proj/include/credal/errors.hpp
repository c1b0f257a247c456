#pragma once

#include <stdexcept>
#include <string>

namespace credal {

/// Bad shapes, out-of-range parameters, missing labels.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The alternating updates reached a state with no usable mass (the centre
/// system is identically zero).
class FitDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported files: CSV cells, JSON schema, versions.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace credal
