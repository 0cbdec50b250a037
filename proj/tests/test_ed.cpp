#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nqs/ed.hpp"
#include "nqs/linalg.hpp"
#include "nqs/model.hpp"

using namespace nqs;

namespace {

EdResult hand_state(std::vector<double> amps, unsigned n, SectorKind kind) {
  EdResult r;
  r.sector = make_sector(kind, n);
  double nrm = 0.0;
  for (double a : amps) nrm += a * a;
  for (double& a : amps) a /= std::sqrt(nrm);
  r.vector = std::move(amps);
  return r;
}

EdResult ghz(unsigned n) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  v.front() = 1.0;
  v.back() = 1.0;
  return hand_state(std::move(v), n, SectorKind::Full);
}

}  // namespace

TEST_CASE("Lanczos reproduces the dense spectrum, all levels, N<=6") {
  const std::vector<XyzChainModel> zoo = {
      make_model("xxz", {1.0}, 6),
      make_model("xxz", {-0.5}, 6),
      make_model("xxz-sr", {1.5}, 6),
      make_model("j1j2", {1.0, 0.44}, 6),
      make_model("j1j2-sr", {1.0, 0.5}, 6),
      make_model("txyz", {0.5, 0.5, -1.0, -1.0}, 6),
      make_model("txyz-star", {0.25, 0.75, -1.0, -1.0}, 6),
      make_model("txyz-diamond", {1.23, 1.73, -1.0, -1.0}, 6),
  };
  for (const auto& m : zoo) {
    CAPTURE(m.name);
    const auto sector = make_sector(SectorKind::Full, 6);
    std::vector<double> dense_evals;
    linalg::jacobi_eigh(sector.size, dense_matrix(m, sector), dense_evals,
                        nullptr);
    const auto lz = lanczos_full_spectrum(sector_op(m, sector));
    REQUIRE(lz.size() == dense_evals.size());
    for (std::size_t i = 0; i < lz.size(); ++i)
      CHECK(std::abs(lz[i] - dense_evals[i]) <= 1e-10);
  }
}

TEST_CASE("Heisenberg N=4 ground energy is -8 (Pauli convention)") {
  const auto m = make_model("xxz", {1.0}, 4);
  const auto r = lanczos_ground(m, make_sector(SectorKind::Full, 4));
  CHECK(r.energy == doctest::Approx(-8.0).epsilon(1e-10));
  CHECK(r.residual <= 1e-8);
  // Normalization contract.
  double nrm = 0.0;
  for (double v : r.vector) nrm += v * v;
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Majumdar-Ghosh point: E0 = -18 at N=12, J2 = 0.5") {
  const auto m = make_model("j1j2", {1.0, 0.5}, 12);
  const auto r =
      lanczos_ground(m, make_sector(SectorKind::ZeroMagnetization, 12), 1e-10);
  CHECK(std::abs(r.energy - (-18.0)) <= 1e-8);
}

TEST_CASE("large anisotropy: Lanczos equals dense at N=8") {
  const auto m = make_model("xxz", {10.0}, 8);
  const auto sector = make_sector(SectorKind::Full, 8);
  std::vector<double> evals;
  linalg::jacobi_eigh(sector.size, dense_matrix(m, sector), evals, nullptr);
  const auto r = lanczos_ground(m, sector);
  CHECK(std::abs(r.energy - evals[0]) <= 1e-8);
}

TEST_CASE("eigenpair residual: H v = E v") {
  const auto m = make_model("txyz", {0.25, 0.75, -1.0, -1.0}, 8);
  const auto sector = make_sector(SectorKind::Full, 8);
  const auto r = lanczos_ground(m, sector, 1e-11);
  std::vector<double> hv(sector.size);
  matvec(m, sector, r.vector, hv);
  double res = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i)
    res += (hv[i] - r.energy * r.vector[i]) * (hv[i] - r.energy * r.vector[i]);
  CHECK(std::sqrt(res) <= 1e-8 * std::max(1.0, std::abs(r.energy)));
}

TEST_CASE("parity-resolved energies") {
  SUBCASE("classical ferromagnet: degenerate GHZ pair splits across sectors") {
    const auto m = make_model("txyz", {0.0, 0.0, -1.0, -1.0}, 8);
    const auto [es, ea] = z2_resolved_energies(m);
    CHECK(es == doctest::Approx(ea).epsilon(1e-10));
    CHECK(es == doctest::Approx(-16.0).epsilon(1e-10));
  }
  SUBCASE("projected energies respect the variational bound") {
    for (const auto& params :
         {std::vector<double>{0.45, 0.95, -1.0, -1.0},
          std::vector<double>{1.23, 1.73, -1.0, -1.0}}) {
      const auto m = make_model("txyz", params, 10);
      const double e0 =
          lanczos_ground(m, make_sector(SectorKind::Full, 10)).energy;
      const auto [es, ea] = z2_resolved_energies(m);
      CHECK(es >= e0 - 1e-10);
      CHECK(ea >= e0 - 1e-10);
      CHECK(std::min(es, ea) == doctest::Approx(e0).epsilon(1e-9));
    }
  }
}

TEST_CASE("entanglement entropy: product, GHZ, and symmetry") {
  std::vector<double> product(256, 0.0);
  product[0b10110100] = 1.0;
  const auto prod = hand_state(std::move(product), 8, SectorKind::Full);
  for (unsigned cut = 1; cut < 8; ++cut)
    CHECK(entanglement_entropy(prod, cut) == doctest::Approx(0.0));

  const auto g = ghz(8);
  for (unsigned cut = 1; cut < 8; ++cut)
    CHECK(entanglement_entropy(g, cut) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const auto m = make_model("txyz", {0.764, 1.264, -1.0, -1.0}, 10);
  const auto r = lanczos_ground(m, make_sector(SectorKind::Full, 10));
  for (unsigned cut = 1; cut < 10; ++cut)
    CHECK(entanglement_entropy(r, cut) ==
          doctest::Approx(entanglement_entropy(r, 10 - cut)).epsilon(1e-10));
}

TEST_CASE("susceptibility: product state, GHZ, nonnegativity") {
  std::vector<double> up(256, 0.0);
  up[255] = 1.0;
  const auto all_up = hand_state(std::move(up), 8, SectorKind::Full);
  CHECK(susceptibility(all_up, 'z') == doctest::Approx(0.0));

  const auto g = ghz(8);
  CHECK(susceptibility(g, 'z') == doctest::Approx(8.0).epsilon(1e-12));

  const auto m = make_model("txyz", {0.4, 3.0, -1.0, -1.0}, 8);
  const auto r = lanczos_ground(m, make_sector(SectorKind::Full, 8));
  for (char axis : {'x', 'y', 'z'})
    CHECK(susceptibility(r, axis) >= -1e-12);
}

TEST_CASE("correlation: k=0 identity, product-state y correlator vanishes") {
  const auto m = make_model("xxz", {0.5}, 8);
  const auto r = lanczos_ground(m, make_sector(SectorKind::ZeroMagnetization, 8));
  CHECK(correlation(r, 'y', 0) == 1.0);

  std::vector<double> up(256, 0.0);
  up[255] = 1.0;
  const auto all_up = hand_state(std::move(up), 8, SectorKind::Full);
  for (unsigned k = 1; k <= 4; ++k)
    CHECK(correlation(all_up, 'y', k) == doctest::Approx(0.0));
}

TEST_CASE("top-k mass: normalization and GHZ") {
  const auto m = make_model("j1j2", {1.0, 0.3}, 10);
  const auto r = lanczos_ground(m, make_sector(SectorKind::ZeroMagnetization, 10));
  CHECK(top_k_mass(r, r.vector.size()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top_k_mass(ghz(8), 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(top_k_mass(r, r.vector.size() + 1), std::invalid_argument);
}

TEST_CASE("second derivative: affine family gives zero; Richardson consistency") {
  // family(t) = (1 + t) * H: ground energy is affine in t.
  const auto family = [](double t) {
    const double s = 1.0 + t;
    return make_model("custom", {s, s, 0.5 * s, 0.0, 0.0, 0.0, 1.0, 0.0}, 8);
  };
  const double d2 = energy_second_derivative(family, 0.2, 1e-3);
  CHECK(std::abs(d2) <= 10.0 * 1e-10 / (1e-3 * 1e-3));

  // Away from transitions the h and h/2 estimates agree within the
  // truncation model.
  const auto path = [](double t) {
    return make_model("txyz", {0.55 + t, 1.05 + t, -1.0, -1.0}, 8);
  };
  const double h = 0.02;
  const double a = energy_second_derivative(path, 0.05, h, SectorKind::Full,
                                            1e-11);
  const double b = energy_second_derivative(path, 0.05, h / 2,
                                            SectorKind::Full, 1e-11);
  CHECK(std::abs(a - b) <= 4.0 * std::max(0.05, std::abs(b)) * 0.05 + 1e-3);
}

TEST_CASE("phase diagnostics at small N behave like the phase structure") {
  // Parity gap closes deep in the ferromagnetic phase, opens in phase II.
  const auto deep_i = make_model("txyz", {0.3, 0.8, -1.0, -1.0}, 12);
  const auto [es_i, ea_i] = z2_resolved_energies(deep_i);
  const double gap_i = std::abs((es_i - ea_i) / es_i);

  const auto deep_ii = make_model("txyz", {1.1, 1.6, -1.0, -1.0}, 12);
  const auto [es_ii, ea_ii] = z2_resolved_energies(deep_ii);
  const double gap_ii = std::abs((es_ii - ea_ii) / es_ii);
  CHECK(gap_i < 1e-4);
  CHECK(gap_ii > 10.0 * gap_i);
}
