#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/model.hpp"
#include "nqs/rng.hpp"

namespace nqs {

using cplx = std::complex<double>;

// Complex RBM psi(x) = exp(sum_i a_i x_i) * prod_j 2 cosh(chi_j) with
// chi_j = sum_i w_ij x_i + b_j. Parameter vector order is fixed globally:
// a, b, then w row-major by (i, j).
struct RbmParameters {
  unsigned n_visible = 0;
  unsigned n_hidden = 0;
  std::vector<cplx> a;  // N
  std::vector<cplx> b;  // M
  std::vector<cplx> w;  // N x M, w[i*M + j]

  std::size_t n_params() const { return a.size() + b.size() + w.size(); }
  // theta_k -= eta * delta_k in the fixed ordering.
  void apply_update(std::span<const cplx> delta, double eta);
};

RbmParameters init_random(unsigned n_visible, unsigned alpha, double sigma,
                          CounterRng& rng);

// Hidden activations bound to one configuration; updated in O(M * flips).
struct ActivationLookup {
  std::vector<cplx> chi;
  SpinConfiguration bound_config;
};

ActivationLookup make_lookup(const RbmParameters&, SpinConfiguration x);
void refresh_lookup(ActivationLookup&, const RbmParameters&,
                    SpinConfiguration x);
// Flip the listed (distinct) sites in the bound configuration, adjusting chi.
void apply_flips(ActivationLookup&, const RbmParameters&,
                 std::span<const unsigned> flips);

// Overflow-safe log(2 cosh z): fold to Re z >= 0, then z + log1p(exp(-2z));
// imaginary part reduced into (-pi, pi].
cplx log2cosh(cplx z);
// Re log(2 cosh z) alone (acceptance path: no phase computation at all).
double re_log2cosh(cplx z);
// Overflow-safe tanh for the log-derivatives.
cplx tanh_stable(cplx z);

cplx log_psi(const RbmParameters&, SpinConfiguration x);
// E(x; theta) = log_psi - M log 2.
cplx quasi_energy(const RbmParameters&, SpinConfiguration x);

// O_k(x) = d log psi / d theta_k into out[0 .. n_params).
void log_derivatives(const RbmParameters&, const ActivationLookup&,
                     cplx* out);

// psi(x') / psi(x) for x' = bound config with `flips` negated; log-domain.
cplx log_ratio(const RbmParameters&, const ActivationLookup&,
               std::span<const unsigned> flips);
cplx ratio(const RbmParameters&, const ActivationLookup&,
           std::span<const unsigned> flips);
double log_ratio_re(const RbmParameters&, const ActivationLookup&,
                    std::span<const unsigned> flips);

// E_loc(x) = sum_{x'} H_{x',x} psi(x')/psi(x) over the local connections.
cplx local_energy(const XyzChainModel&, const RbmParameters&,
                  const ActivationLookup&);

// Checkpoint: little-endian {u32 N, u32 M} header + complex doubles in the
// fixed parameter ordering.
void save_rbm(const RbmParameters&, const std::string& path);
RbmParameters load_rbm(const std::string& path);

}  // namespace nqs
