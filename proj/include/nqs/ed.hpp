#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/model.hpp"

namespace nqs {

struct LinearOp {
  std::uint64_t dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

// H restricted to a sector (throws SectorError on incompatible connections).
LinearOp sector_op(const XyzChainModel&, const BasisSector&);
// H in the eigenspace of the global spin flip X^(x)N with the given parity,
// over representatives x < flip(x) (dimension 2^(N-1)).
LinearOp parity_op(const XyzChainModel&, int parity);

struct EdResult {
  double energy = 0.0;
  std::vector<double> vector;  // canonical sector order, normalized
  BasisSector sector;
  unsigned n_iterations = 0;
  double residual = 0.0;
};

// Lowest eigenpair by thick-restart Lanczos with full reorthogonalization
// against the retained basis. Deterministic for a fixed seed; the returned
// vector is oriented so its largest-magnitude entry is positive.
EdResult lanczos_ground(const XyzChainModel&, const BasisSector&,
                        double tol = 1e-10, std::uint64_t seed = 7,
                        unsigned max_iter = 2000);

struct LowestResult {
  double value = 0.0;
  std::vector<double> vector;
  unsigned iterations = 0;
  double residual = 0.0;
};
LowestResult lanczos_lowest(const LinearOp&, double tol, std::uint64_t seed,
                            unsigned max_iter, unsigned basis_cap = 0);

// Runs the recursion out to the full dimension; all Ritz values = spectrum.
// Only sensible for small operators (dim <= ~2000).
std::vector<double> lanczos_full_spectrum(const LinearOp&,
                                          std::uint64_t seed = 7);

// Lowest energies in the symmetric / antisymmetric spin-flip sectors.
std::pair<double, double> z2_resolved_energies(const XyzChainModel&,
                                               double tol = 1e-10,
                                               std::uint64_t seed = 7);

// Scatter the sector vector into the full 2^N amplitude array.
std::vector<double> full_amplitudes(const EdResult&);

// Von Neumann entropy (natural log) of the reduced state on sites [0, cut).
double entanglement_entropy(const EdResult&, unsigned cut);

// chi_alpha = (<J_alpha^2> - <J_alpha>^2) / N with J_alpha = sum_i sigma_i^alpha.
double susceptibility(const EdResult&, char axis);

// C^aa(k) = sum_i <sigma^a_i sigma^a_{i+k}> / N.
double correlation(const EdResult&, char axis, unsigned k);

// Sum of the k largest |psi(x)|^2.
double top_k_mass(const EdResult&, std::size_t k);

// Central difference [E(t+h) - 2E(t) + E(t-h)] / h^2 of the ground energy
// of family(t) in the given sector.
double energy_second_derivative(
    const std::function<XyzChainModel(double)>& family, double theta, double h,
    SectorKind kind = SectorKind::Full, double tol = 1e-10);

}  // namespace nqs
