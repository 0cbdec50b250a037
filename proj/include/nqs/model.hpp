#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nqs/basis.hpp"

namespace nqs {

// Diagonal coupling matrix beta = diag(beta^x, beta^y, beta^z) of one bond.
struct CouplingMatrix {
  double bx = 0.0, by = 0.0, bz = 0.0;

  double axis(unsigned k) const { return k == 0 ? bx : (k == 1 ? by : bz); }
  friend bool operator==(const CouplingMatrix&,
                         const CouplingMatrix&) = default;
};

// Translation-invariant periodic chain
//   H = j1 * sum_i [b1x XX + b1y YY + b1z ZZ]_{i,i+1}
//     + j2 * sum_i [b2x XX + b2y YY + b2z ZZ]_{i,i+2}
// in Pauli operator convention.
struct XyzChainModel {
  unsigned n_sites = 0;
  double j1 = 0.0, j2 = 0.0;
  CouplingMatrix beta1, beta2;
  std::string name = "custom";
  std::vector<double> params;
};

// Named constructors:
//   xxz [Delta], xxz-sr [Delta], j1j2 [J1, J2], j1j2-sr [J1, J2],
//   txyz | txyz-star | txyz-diamond [a, b, J1, J2],
//   custom [b1x, b1y, b1z, b2x, b2y, b2z, J1, J2].
// The -sr variants are the even-site Pauli-Z conjugated forms and require
// even N (the gate pattern does not close on an odd ring).
XyzChainModel make_model(const std::string& name,
                         const std::vector<double>& params, unsigned n_sites);

// One nonzero row entry of H: x' = x ^ flip_mask. flip_mask == 0 is the
// diagonal, accumulated once per configuration.
struct Connection {
  std::uint32_t flip_mask;
  double element;
};

// All nonzero elements of column x, diagonal first. Duplicate flip masks
// (the N=4 next-nearest ring) are merged.
void local_connections(const XyzChainModel&, SpinConfiguration x,
                       std::vector<Connection>& out);
std::vector<std::pair<SpinConfiguration, double>> connection_pairs(
    const XyzChainModel&, SpinConfiguration x);

// True iff both scaled bond matrices already satisfy j*b^x <= -|j*b^y|.
bool is_stoquastic_as_written(const XyzChainModel&);

// H * v restricted to the sector (real symmetric H). Throws SectorError if a
// connection with nonzero element leaves the sector.
void matvec(const XyzChainModel&, const BasisSector&, std::span<const double> v,
            std::span<double> out);

// Dense row-major matrix over the sector, built from local_connections.
std::vector<double> dense_matrix(const XyzChainModel&, const BasisSector&);

}  // namespace nqs
