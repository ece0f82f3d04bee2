#pragma once

#include <stdexcept>
#include <string>

namespace fmslab {

// Each error class maps onto one CLI exit status.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fmslab
