#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <set>

#include "nqs/basis.hpp"
#include "nqs/errors.hpp"
#include "nqs/rng.hpp"

using namespace nqs;

TEST_CASE("full sector at N=2 enumerates --, -+, +-, ++") {
  const auto v = enumerate_sector(2, SectorKind::Full);
  REQUIRE(v.size() == 4);
  CHECK(v[0].to_spins() == std::vector<int>{-1, -1});
  CHECK(v[1].to_spins() == std::vector<int>{+1, -1});
  CHECK(v[2].to_spins() == std::vector<int>{-1, +1});
  CHECK(v[3].to_spins() == std::vector<int>{+1, +1});
}

TEST_CASE("zero-magnetization sector sizes") {
  CHECK(enumerate_sector(4, SectorKind::ZeroMagnetization).size() == 6);
  const auto v12 = enumerate_sector(12, SectorKind::ZeroMagnetization);
  CHECK(v12.size() == 924);  // C(12, 6)
  for (const auto& c : enumerate_sector(4, SectorKind::ZeroMagnetization))
    CHECK(std::popcount(c.bits) == 2);
}

TEST_CASE("rejects odd N for zero magnetization and out-of-budget N") {
  CHECK_THROWS_AS(make_sector(SectorKind::ZeroMagnetization, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_sector(SectorKind::Full, 25), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(SectorKind::Full, 1), std::invalid_argument);
}

TEST_CASE("canonical order is ascending in the bit word") {
  for (auto kind : {SectorKind::Full, SectorKind::ZeroMagnetization}) {
    const auto v = enumerate_sector(8, kind);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1].bits < v[i].bits);
  }
}

TEST_CASE("sector_index is the inverse of enumeration (bijection anchors)") {
  for (auto kind : {SectorKind::Full, SectorKind::ZeroMagnetization}) {
    const auto sector = make_sector(kind, 10);
    const auto v = enumerate_sector(10, kind);
    CHECK(sector_index(v.front(), sector) == 0);
    CHECK(sector_index(v.back(), sector) == sector.size - 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(sector_index(v[i], sector) == i);
      CHECK(config_at(i, sector) == v[i]);
    }
  }
}

TEST_CASE("random configs round-trip through config_at at N=10") {
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 10);
  CounterRng rng(1234, 0);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t idx = rng.uniform_int(sector.size);
    const SpinConfiguration c = config_at(idx, sector);
    CHECK(sector_index(c, sector) == idx);
  }
}

TEST_CASE("membership errors for configs outside the sector") {
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 6);
  CHECK_THROWS_AS(sector_index({0b1111u, 6}, sector), SectorError);  // 4 up
  CHECK_THROWS_AS(sector_index({0b111000u, 8}, sector), SectorError);  // wrong N
}

TEST_CASE("whole-sector invariants up to N=16") {
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 16);
  const auto v = enumerate_sector(16, SectorKind::ZeroMagnetization);
  REQUIRE(v.size() == sector.size);
  CHECK(sector.size == binomial(16, 8));
  std::set<std::uint32_t> seen;
  for (std::size_t i = 0; i < v.size(); ++i) {
    int mag = 0;
    for (unsigned s = 0; s < 16; ++s) mag += v[i].spin(s);
    CHECK(mag == 0);
    CHECK(sector_index(v[i], sector) == i);
    seen.insert(v[i].bits);
  }
  CHECK(seen.size() == sector.size);  // no collisions, full coverage
}

TEST_CASE("spin decode/encode round-trip is the identity") {
  CounterRng rng(99, 1);
  for (int t = 0; t < 50; ++t) {
    SpinConfiguration c{static_cast<std::uint32_t>(rng.uniform_int(1u << 14)),
                        14};
    CHECK(SpinConfiguration::from_spins(c.to_spins()) == c);
  }
}
