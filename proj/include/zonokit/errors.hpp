#pragma once

#include <stdexcept>
#include <string>

namespace zonokit {

// Raised when a property the filter guarantees under its standing assumptions
// fails at runtime, e.g. the estimate collection turning empty. That situation
// certifies an assumption breach (more sensors attacked than budgeted for)
// rather than an ordinary input error.
class invariant_violation : public std::runtime_error {
 public:
  explicit invariant_violation(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed scenario files and policy configurations.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zonokit
