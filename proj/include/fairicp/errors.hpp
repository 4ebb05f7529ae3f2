#pragma once

#include <stdexcept>
#include <string>

namespace fairicp {

// Bad user input: malformed config, schema violations, invalid parameters.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad data or a numeric failure at run time (singular fit, divergence,
// dimension mismatch). The CLI maps this to exit code 3.
struct RuntimeError : std::runtime_error {
  explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fairicp
