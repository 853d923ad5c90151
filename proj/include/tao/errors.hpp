#pragma once

#include <stdexcept>
#include <string>

namespace tao {

/// Malformed or inconsistent scenario/config input. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure (e.g. a problem that is infeasible even with everything
/// offloaded). The CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tao
