#pragma once

#include <stdexcept>
#include <string>

namespace pngsfp {

// Bad game specs, configs, file IO. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failures: CFL violations, non-finite states,
// non-convergence where convergence is required. CLI exit code 1.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pngsfp
