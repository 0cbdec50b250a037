#include "nqs/stoq.hpp"

#include <cmath>
#include <stdexcept>

namespace nqs {

namespace {

SignedPermutation from_images(int px, int py, int pz) {
  SignedPermutation p;
  p.perm = {px, py, pz};
  return p;
}

int rank_of(const CouplingMatrix& b, double j) {
  return (j * b.bx != 0.0) + (j * b.by != 0.0) + (j * b.bz != 0.0);
}

}  // namespace

const std::array<SignedPermutation, 6>& all_permutations() {
  static const std::array<SignedPermutation, 6> perms = {
      from_images(0, 1, 2),  // ()
      from_images(1, 0, 2),  // (1,2)
      from_images(0, 2, 1),  // (2,3)
      from_images(2, 1, 0),  // (1,3)
      from_images(1, 2, 0),  // (1,2,3)
      from_images(2, 0, 1),  // (1,3,2)
  };
  return perms;
}

std::string perm_name(const SignedPermutation& p) {
  const auto& q = p.perm;
  if (q[0] == 0 && q[1] == 1) return "()";
  if (q[0] == 1 && q[1] == 0 && q[2] == 2) return "(1,2)";
  if (q[0] == 0 && q[1] == 2) return "(2,3)";
  if (q[0] == 2 && q[1] == 1) return "(1,3)";
  if (q[0] == 1 && q[1] == 2) return "(1,2,3)";
  if (q[0] == 2 && q[1] == 0) return "(1,3,2)";
  return "?";
}

CouplingMatrix permute_coupling(const CouplingMatrix& b,
                                const SignedPermutation& p) {
  double out[3];
  out[p.perm[0]] = b.bx;
  out[p.perm[1]] = b.by;
  out[p.perm[2]] = b.bz;
  return {out[0], out[1], out[2]};
}

XyzChainModel apply_signed_permutation(const XyzChainModel& m,
                                       const SignedPermutation& p) {
  if (p.parity_site_flip && m.n_sites % 2 != 0)
    throw std::invalid_argument(
        "even-site sign flip requires even N (odd rings are not 2-colorable)");
  XyzChainModel out = m;
  out.beta1 = permute_coupling(m.beta1, p);
  out.beta2 = permute_coupling(m.beta2, p);
  if (p.parity_site_flip) {
    // Pauli-Z on even sites: flips x and y couplings of every NN bond (the y
    // sign is irrelevant for stoquasticity, but the pair flip is what the
    // unitary actually does, and it preserves the spectrum).
    out.beta1.bx = -out.beta1.bx;
    out.beta1.by = -out.beta1.by;
  }
  out.name = "custom";
  out.params = {out.beta1.bx, out.beta1.by, out.beta1.bz, out.beta2.bx,
                out.beta2.by, out.beta2.bz, out.j1,       out.j2};
  return out;
}

StoqVerdict find_stoquastic_transformation(const CouplingMatrix& beta1,
                                           const CouplingMatrix& beta2,
                                           double j1, double j2) {
  StoqVerdict verdict;
  const CouplingMatrix b1{j1 * beta1.bx, j1 * beta1.by, j1 * beta1.bz};
  const CouplingMatrix b2{j2 * beta2.bx, j2 * beta2.by, j2 * beta2.bz};

  for (const auto& perm : all_permutations()) {
    const CouplingMatrix t1 = permute_coupling(b1, perm);
    const CouplingMatrix t2 = permute_coupling(b2, perm);
    // No sign freedom on next-nearest bonds (same-parity endpoints).
    const bool nnn_ok = t2.bx <= -std::abs(t2.by);
    PermutationCheck check{perm, false};
    if (nnn_ok) {
      if (t1.bx <= -std::abs(t1.by)) {
        check.satisfied = true;
      } else if (std::abs(t1.bx) >= std::abs(t1.by)) {
        check.satisfied = true;
        check.perm.parity_site_flip = true;
      }
    }
    if (check.satisfied && !verdict.witness) {
      verdict.transformable = true;
      verdict.witness = check.perm;
    }
    verdict.checked_permutations.push_back(check);
  }

  // With some bond of rank <= 1 the per-site permutations are no longer
  // forced to be uniform (Lemma 23 applies only to rank >= 2 edges), so a
  // negative uniform result is not conclusive. NN-only chains are exempt:
  // uniform + the parity flip already realize every translation-invariant
  // transformation there.
  const bool nnn_present = b2.bx != 0.0 || b2.by != 0.0 || b2.bz != 0.0;
  if (!verdict.transformable && nnn_present &&
      (rank_of(beta1, j1) <= 1 || rank_of(beta2, j2) <= 1))
    verdict.rank_degenerate = true;
  return verdict;
}

std::vector<SignedPermutation> classify_txyz_region(double a, double b,
                                                    double j1, double j2) {
  (void)j1;  // the NN x-coupling sign is free, so J1 drops out
  const double aa = std::abs(a), ab = std::abs(b);
  const auto& perms = all_permutations();
  const bool sat[6] = {
      aa == ab && j2 * b <= 0.0,            // ()
      ab == aa && j2 * a <= 0.0,            // (1,2)
      aa >= 1.0 && ab >= 1.0 && j2 * b <= 0.0,  // (2,3)
      1.0 >= ab && 1.0 >= aa && j2 <= 0.0,      // (1,3)
      1.0 >= aa && 1.0 >= ab && j2 <= 0.0,      // (1,2,3)
      ab >= 1.0 && aa >= 1.0 && j2 * a <= 0.0,  // (1,3,2)
  };
  std::vector<SignedPermutation> out;
  for (int i = 0; i < 6; ++i)
    if (sat[i]) out.push_back(perms[i]);
  return out;
}

}  // namespace nqs
