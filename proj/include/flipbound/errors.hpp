#pragma once

#include <stdexcept>
#include <string>

namespace flipbound {

/// Bad user input: malformed files, out-of-range parameters, shape mismatches.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simplex stalled, a trainer diverged, or a result failed its own re-check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SGD blew past the weight guard.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No classifier within the weight cap can classify the target as desired.
class TargetUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flipbound
