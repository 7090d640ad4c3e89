#pragma once

#include <stdexcept>
#include <string>

namespace ddag {

// Invalid configuration or violated precondition on user-supplied values.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine could not produce a trustworthy answer
// (singular system beyond ridge rescue, divergent iteration, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddag
