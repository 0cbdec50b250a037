#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nqs/linalg.hpp"
#include "nqs/model.hpp"
#include "nqs/stoq.hpp"

using namespace nqs;

namespace {

StoqVerdict verdict_for_txyz(double a, double b, double j1, double j2) {
  const auto m = make_model("txyz", {a, b, j1, j2}, 8);
  return find_stoquastic_transformation(m.beta1, m.beta2, m.j1, m.j2);
}

}  // namespace

TEST_CASE("identity permutation leaves a model unchanged") {
  const auto m = make_model("txyz", {0.3, 1.1, -1.0, -1.0}, 8);
  const auto t = apply_signed_permutation(m, SignedPermutation{});
  CHECK(t.beta1 == m.beta1);
  CHECK(t.beta2 == m.beta2);
}

TEST_CASE("(1,3) maps the twisted couplings onto the star pattern") {
  const double a = 0.25, b = 0.75;
  const auto m = make_model("txyz", {a, b, -1.0, -1.0}, 8);
  SignedPermutation p;
  p.perm = {2, 1, 0};  // swap x and z
  const auto t = apply_signed_permutation(m, p);
  const auto star = make_model("txyz-star", {a, b, -1.0, -1.0}, 8);
  CHECK(t.beta1 == star.beta1);
  CHECK(t.beta2 == star.beta2);
}

TEST_CASE("signed-permutation conjugation preserves the spectrum at N=8") {
  const auto m = make_model("txyz", {0.4, 1.3, -1.0, -1.0}, 8);
  const auto sector = make_sector(SectorKind::Full, 8);
  std::vector<double> s0, s1;
  linalg::jacobi_eigh(sector.size, dense_matrix(m, sector), s0, nullptr);
  for (const auto& p : all_permutations()) {
    for (bool flip : {false, true}) {
      SignedPermutation q = p;
      q.parity_site_flip = flip;
      const auto t = apply_signed_permutation(m, q);
      linalg::jacobi_eigh(sector.size, dense_matrix(t, sector), s1, nullptr);
      for (std::size_t i = 0; i < s0.size(); ++i)
        CHECK(std::abs(s0[i] - s1[i]) <= 1e-10);
    }
  }
}

TEST_CASE("even-site flip rejects odd rings") {
  const auto m = make_model("xxz", {1.0}, 7);
  SignedPermutation p;
  p.parity_site_flip = true;
  CHECK_THROWS_AS(apply_signed_permutation(m, p), std::invalid_argument);
}

TEST_CASE("twisted XYZ point A is transformable with witness (1,3)") {
  const auto v = verdict_for_txyz(0.25, 0.75, -1.0, -1.0);
  REQUIRE(v.transformable);
  REQUIRE(v.witness.has_value());
  CHECK(perm_name(*v.witness) == "(1,3)");
  CHECK(v.checked_permutations.size() == 6);
}

TEST_CASE("deep phase-Lambda point is not transformable") {
  const auto v = verdict_for_txyz(0.4, 3.0, -1.0, -1.0);
  CHECK_FALSE(v.transformable);
  CHECK_FALSE(v.witness.has_value());
}

TEST_CASE("J1-J2 with J2 > 0 admits no on-site transformation") {
  const auto m = make_model("j1j2", {1.0, 0.5}, 8);
  const auto v =
      find_stoquastic_transformation(m.beta1, m.beta2, m.j1, m.j2);
  CHECK_FALSE(v.transformable);
  const auto neg = make_model("j1j2", {1.0, -0.3}, 8);
  CHECK(find_stoquastic_transformation(neg.beta1, neg.beta2, neg.j1, neg.j2)
            .transformable);
}

TEST_CASE("classification examples from the closed-form conditions") {
  SUBCASE("(1.23, 1.73): (2,3) and its |a|,|b| >= 1 companion") {
    const auto set = classify_txyz_region(1.23, 1.73, -1.0, -1.0);
    REQUIRE(set.size() == 2);
    CHECK(perm_name(set[0]) == "(2,3)");
    CHECK(perm_name(set[1]) == "(1,3,2)");
  }
  SUBCASE("point O includes the identity") {
    const auto set = classify_txyz_region(0.5, 0.5, -1.0, -1.0);
    bool has_identity = false;
    for (const auto& p : set)
      if (perm_name(p) == "()") has_identity = true;
    CHECK(has_identity);
  }
  SUBCASE("(0.25, 1.75) satisfies none") {
    CHECK(classify_txyz_region(0.25, 1.75, -1.0, -1.0).empty());
  }
}

TEST_CASE("41x41 grid: soundness, closed-form consistency, quadrants") {
  const auto m8 = [](double a, double b) {
    return make_model("txyz", {a, b, -1.0, -1.0}, 8);
  };
  for (int ia = 0; ia <= 40; ++ia) {
    for (int ib = 0; ib <= 40; ++ib) {
      const double a = 2.5 * ia / 40.0, b = 2.5 * ib / 40.0;
      const auto v = verdict_for_txyz(a, b, -1.0, -1.0);
      const auto closed = classify_txyz_region(a, b, -1.0, -1.0);
      // Agreement with the closed-form region classification.
      CHECK(v.transformable == !closed.empty());
      // Quadrant structure of Fig. 2's dashed lines.
      const bool expected = (a <= 1.0 && b <= 1.0) || (a >= 1.0 && b >= 1.0);
      CHECK(v.transformable == expected);
      // Witness soundness under conjugation.
      if (v.transformable) {
        const auto t = apply_signed_permutation(m8(a, b), *v.witness);
        CHECK(is_stoquastic_as_written(t));
      }
    }
  }
}

TEST_CASE("rank-degenerate couplings are flagged when uniform search fails") {
  // Pure zz NNN bond with positive sign cannot be fixed uniformly; the
  // verdict must carry the degeneracy flag rather than claim completeness.
  const CouplingMatrix b1{0.0, 0.0, 1.0};
  const CouplingMatrix b2{1.0, 0.0, 1.0};
  const auto v = find_stoquastic_transformation(b1, b2, 0.0, 1.0);
  CHECK_FALSE(v.transformable);
  CHECK(v.rank_degenerate);
  // Ising-only chains stay exact: uniform + parity flip covers them.
  const CouplingMatrix ising{1.0, 0.0, 0.0};
  const auto vi =
      find_stoquastic_transformation(ising, CouplingMatrix{}, 1.0, 0.0);
  CHECK(vi.transformable);
  CHECK_FALSE(vi.rank_degenerate);
}
