#pragma once

#include <stdexcept>
#include <string>

namespace unmix {

// Invalid arguments, malformed configs, dimension mismatches.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Filesystem and format failures while reading or writing artifacts.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unmix
