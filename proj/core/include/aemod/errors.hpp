#pragma once

#include <stdexcept>
#include <string>

namespace aemod {

/// Invalid or inconsistent input: malformed config files, dimension
/// mismatches, probability vectors that do not sum to one.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The model itself admits no solution (demand exceeds vehicle inflow,
/// charging capacity insufficient). Distinct from ConfigError so callers
/// can map it to a dedicated exit code.
class InfeasibleError : public std::runtime_error {
  public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal numerical failure (pivot cycling guard, iteration cap).
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aemod
