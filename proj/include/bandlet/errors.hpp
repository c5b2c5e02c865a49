#pragma once
#include <stdexcept>

namespace bandlet {

// bad argument or configuration values
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// structurally inconsistent data (shape mismatches, malformed streams)
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// file open/read/write problems
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// noise level outside the guaranteed range sigma <= 1/4
struct regime_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace bandlet
