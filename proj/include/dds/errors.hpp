#pragma once

#include <stdexcept>
#include <string>

namespace dds {

// Invalid user input: bad flags, malformed files, incompatible artifacts.
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: singular states, flagged-infinite rates, non-finite
// intermediate values. The CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dds
