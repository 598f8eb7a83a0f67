#pragma once

#include <stdexcept>
#include <string>

namespace ganforge {

// Error taxonomy maps 1:1 onto CLI exit codes:
//   ConfigError -> 1, NumericError -> 2, IoError -> 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ganforge
