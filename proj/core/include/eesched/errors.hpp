#pragma once

#include <stdexcept>
#include <string>

namespace eesched {

/// Raised when an expectation against the channel density does not converge,
/// e.g. E[1/g] for a Gamma channel with shape <= 1.
class NonIntegrable : public std::runtime_error {
 public:
  explicit NonIntegrable(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-range channel parameters.
class InvalidChannel : public std::invalid_argument {
 public:
  explicit InvalidChannel(const std::string& what) : std::invalid_argument(what) {}
};

/// A DP table lookup outside the solved horizon or bit range.
class OutOfTable : public std::out_of_range {
 public:
  explicit OutOfTable(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace eesched
