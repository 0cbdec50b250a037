#pragma once

#include <stdexcept>
#include <string>

namespace nqs {

// Configuration outside a sector, or a Hamiltonian connection leaving it.
struct SectorError : std::runtime_error {
  explicit SectorError(const std::string& what) : std::runtime_error(what) {}
};

// (S + lambda I) could not be solved even after the fallback path.
struct SingularUpdateError : std::runtime_error {
  explicit SingularUpdateError(const std::string& what)
      : std::runtime_error(what) {}
};

// All-zero amplitude vector handed to the exact sampler.
struct DegenerateDistributionError : std::runtime_error {
  explicit DegenerateDistributionError(const std::string& what)
      : std::runtime_error(what) {}
};

// Invalid experiment configuration (schema violations, unknown keys).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nqs
