#pragma once

#include <stdexcept>
#include <string>

namespace ppgm {

/// Malformed problem data: dimension mismatches, invalid constraint sets.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or blow-up during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method left its stable regime.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// API misuse, e.g. shape mismatches or foreign tape handles.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ppgm
