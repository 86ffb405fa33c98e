#pragma once

#include <stdexcept>
#include <string>

namespace modcomp {

/// Bad user-supplied argument or configuration (CLI exit code 1).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data-dependent numerical failure such as a singular design (CLI exit code 2).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modcomp
