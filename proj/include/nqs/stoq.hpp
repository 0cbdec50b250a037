#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nqs/model.hpp"

namespace nqs {

// On-site signed axis permutation. perm[k] is the image of axis k
// (0=x, 1=y, 2=z), so conjugation maps beta[k] to position perm[k]. Uniform
// per-axis signs cancel in an XYZ coupling; the one sign that matters on the
// chain is the even-site Pauli-Z, which flips the x (and y) couplings of
// every nearest-neighbor bond and leaves next-nearest bonds alone.
struct SignedPermutation {
  std::array<int, 3> perm = {0, 1, 2};
  std::array<int, 3> signs = {1, 1, 1};
  bool parity_site_flip = false;
};

// Cycle notation over axes {1,2,3}: "()", "(1,2)", ...
std::string perm_name(const SignedPermutation&);

// Identity + the fixed enumeration order (), (1,2), (2,3), (1,3), (1,2,3),
// (1,3,2) used everywhere a witness is reported.
const std::array<SignedPermutation, 6>& all_permutations();

// Conjugate the chain couplings: beta -> Pi beta Pi^T per bond, plus the
// even-site sign flip on the nearest-neighbor x coupling when requested
// (even N required in that case).
XyzChainModel apply_signed_permutation(const XyzChainModel&,
                                       const SignedPermutation&);
CouplingMatrix permute_coupling(const CouplingMatrix&,
                                const SignedPermutation&);

struct PermutationCheck {
  SignedPermutation perm;
  bool satisfied = false;
};

struct StoqVerdict {
  bool transformable = false;
  std::optional<SignedPermutation> witness;
  std::vector<PermutationCheck> checked_permutations;
  // Set when some scaled bond matrix has rank <= 1 and no uniform witness was
  // found: per-site permutations are not forced to agree in that regime, so
  // the uniform search is sound but not complete.
  bool rank_degenerate = false;
};

// Klassen-Terhal test specialized to the translation-invariant NN+NNN chain:
// iterate the six uniform axis permutations; a permutation succeeds when the
// next-nearest bond satisfies j2*bx <= -|j2*by| as written and the
// nearest-neighbor bond does so up to the free even-site sign flip
// (|j1*b1x| >= |j1*b1y|). First satisfying permutation becomes the witness.
StoqVerdict find_stoquastic_transformation(const CouplingMatrix& beta1,
                                           const CouplingMatrix& beta2,
                                           double j1, double j2);

// The six closed-form conditions for the twisted XYZ couplings
// beta1 = J1 diag(a,b,1), beta2 = J2 diag(b,a,1), evaluated verbatim.
// Returns the satisfying permutations in the fixed order.
std::vector<SignedPermutation> classify_txyz_region(double a, double b,
                                                    double j1, double j2);

}  // namespace nqs
