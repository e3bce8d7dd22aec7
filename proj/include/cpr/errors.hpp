#pragma once

#include <stdexcept>
#include <string>

namespace cpr {

// Numerical/recovery failures (exit code 2 in the CLI).
struct RecoveryError : std::runtime_error {
  explicit RecoveryError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed inputs, specs and configuration (exit code 3 in the CLI).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cpr
