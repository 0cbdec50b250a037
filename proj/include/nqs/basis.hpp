#pragma once

#include <cstdint>
#include <vector>

namespace nqs {

// One chain configuration in the Pauli-Z basis. Bit i set means spin +1 at
// site i; only the low n_sites bits may be set. Kept at 8 bytes so ED-scale
// tables of configurations stay cheap.
struct SpinConfiguration {
  std::uint32_t bits = 0;
  std::uint32_t n_sites = 0;

  int spin(unsigned i) const { return (bits >> i) & 1u ? +1 : -1; }
  SpinConfiguration flipped(std::uint32_t mask) const {
    return {bits ^ mask, n_sites};
  }

  std::vector<int> to_spins() const;
  static SpinConfiguration from_spins(const std::vector<int>& s);

  friend bool operator==(const SpinConfiguration&,
                         const SpinConfiguration&) = default;
};

enum class SectorKind { Full, ZeroMagnetization };

struct BasisSector {
  SectorKind kind = SectorKind::Full;
  unsigned n_sites = 0;
  std::uint64_t size = 0;
};

// C(n, k) for n <= 32, exact in 64 bits.
std::uint64_t binomial(unsigned n, unsigned k);

// Validates N and builds the sector descriptor.
BasisSector make_sector(SectorKind kind, unsigned n_sites);

bool sector_contains(const BasisSector&, SpinConfiguration);

// Bijection between the sector and [0, size) in canonical order (ascending
// bit-word). ZeroMagnetization uses combinatorial ranking: O(N), no lookup
// tables beyond the binomial cache.
std::uint64_t sector_index(SpinConfiguration, const BasisSector&);
SpinConfiguration config_at(std::uint64_t index, const BasisSector&);

// All members in canonical order; size matches the sector descriptor.
std::vector<SpinConfiguration> enumerate_sector(unsigned n_sites,
                                                SectorKind kind);

}  // namespace nqs
