#include "nqs/basis.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "nqs/errors.hpp"

namespace nqs {

namespace {

constexpr unsigned kMaxSites = 24;

struct BinomialTable {
  std::uint64_t c[33][33] = {};
  BinomialTable() {
    for (unsigned n = 0; n <= 32; ++n) {
      c[n][0] = 1;
      for (unsigned k = 1; k <= n; ++k)
        c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
    }
  }
};

const BinomialTable g_binom;

}  // namespace

std::vector<int> SpinConfiguration::to_spins() const {
  std::vector<int> s(n_sites);
  for (unsigned i = 0; i < n_sites; ++i) s[i] = spin(i);
  return s;
}

SpinConfiguration SpinConfiguration::from_spins(const std::vector<int>& s) {
  SpinConfiguration c{0, static_cast<std::uint32_t>(s.size())};
  for (unsigned i = 0; i < s.size(); ++i)
    if (s[i] > 0) c.bits |= (1u << i);
  return c;
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (n > 32 || k > n) return 0;
  return g_binom.c[n][k];
}

BasisSector make_sector(SectorKind kind, unsigned n_sites) {
  if (n_sites < 2 || n_sites > kMaxSites)
    throw std::invalid_argument("sector: need 2 <= N <= " +
                                std::to_string(kMaxSites) + ", got N = " +
                                std::to_string(n_sites));
  if (kind == SectorKind::ZeroMagnetization && n_sites % 2 != 0)
    throw std::invalid_argument(
        "zero-magnetization sector requires even N, got N = " +
        std::to_string(n_sites));
  BasisSector s;
  s.kind = kind;
  s.n_sites = n_sites;
  s.size = kind == SectorKind::Full ? (std::uint64_t{1} << n_sites)
                                    : binomial(n_sites, n_sites / 2);
  return s;
}

bool sector_contains(const BasisSector& sector, SpinConfiguration c) {
  if (c.n_sites != sector.n_sites) return false;
  if (c.bits >> sector.n_sites) return false;
  if (sector.kind == SectorKind::ZeroMagnetization)
    return static_cast<unsigned>(std::popcount(c.bits)) == sector.n_sites / 2;
  return true;
}

std::uint64_t sector_index(SpinConfiguration c, const BasisSector& sector) {
  if (!sector_contains(sector, c))
    throw SectorError("configuration is not a member of the sector");
  if (sector.kind == SectorKind::Full) return c.bits;
  // Colex rank of the set-bit positions {p_1 < ... < p_k}: sum_i C(p_i, i).
  std::uint64_t rank = 0;
  unsigned i = 0;
  std::uint32_t bits = c.bits;
  while (bits) {
    const unsigned p = static_cast<unsigned>(std::countr_zero(bits));
    bits &= bits - 1;
    rank += binomial(p, ++i);
  }
  return rank;
}

SpinConfiguration config_at(std::uint64_t index, const BasisSector& sector) {
  if (index >= sector.size)
    throw std::out_of_range("sector index out of range");
  if (sector.kind == SectorKind::Full)
    return {static_cast<std::uint32_t>(index), sector.n_sites};
  std::uint32_t bits = 0;
  std::uint64_t rem = index;
  for (unsigned i = sector.n_sites / 2; i >= 1; --i) {
    // Largest p with C(p, i) <= rem.
    unsigned p = i - 1;
    while (p + 1 < sector.n_sites && binomial(p + 1, i) <= rem) ++p;
    bits |= (1u << p);
    rem -= binomial(p, i);
  }
  return {bits, sector.n_sites};
}

std::vector<SpinConfiguration> enumerate_sector(unsigned n_sites,
                                                SectorKind kind) {
  const BasisSector sector = make_sector(kind, n_sites);
  std::vector<SpinConfiguration> out;
  out.reserve(sector.size);
  if (kind == SectorKind::Full) {
    for (std::uint64_t b = 0; b < sector.size; ++b)
      out.push_back({static_cast<std::uint32_t>(b), n_sites});
    return out;
  }
  // Gosper's hack walks the fixed-popcount words in ascending order.
  const std::uint32_t limit = (n_sites == 32) ? 0xFFFFFFFFu
                                              : (1u << n_sites) - 1u;
  std::uint32_t v = (1u << (n_sites / 2)) - 1u;
  for (;;) {
    out.push_back({v, n_sites});
    const std::uint32_t c = v & static_cast<std::uint32_t>(-static_cast<std::int32_t>(v));
    const std::uint32_t r = v + c;
    if (r > limit) break;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return out;
}

}  // namespace nqs
