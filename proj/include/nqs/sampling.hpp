#pragma once

#include <cstdint>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/rbm.hpp"
#include "nqs/rng.hpp"

namespace nqs {

enum class UpdateRule { SingleFlip, Exchange };

// One Metropolis-Hastings chain at inverse temperature beta, sampling
// |psi(x)|^(2 beta). Acceptance uses only Re of quasi-energy differences.
struct MarkovChain {
  SpinConfiguration config;
  ActivationLookup lookup;
  double beta = 1.0;
  CounterRng rng;
  std::uint64_t accept_count = 0;
  std::uint64_t proposal_count = 0;
  unsigned sweeps_since_refresh = 0;
};

// Initial configuration: uniform bits for SingleFlip; exactly N/2 up spins
// for Exchange (the Jz-conserving start).
MarkovChain make_chain(const RbmParameters&, unsigned n_sites, double beta,
                       UpdateRule rule, std::uint64_t seed,
                       std::uint64_t stream);

// N proposal-accept steps; the lookup is refreshed from scratch every 100
// sweeps to bound incremental drift.
void metropolis_sweep(MarkovChain&, const RbmParameters&, UpdateRule);

// Configuration-swap acceptance between neighboring tempering chains:
// min(1, exp(2 (beta_i - beta_j) * (reE_j - reE_i))).
double swap_probability(double beta_i, double beta_j, double re_e_i,
                        double re_e_j);

// 16 chains at beta_i = i/16; samples are read off the beta = 1 chain.
struct TemperedEnsemble {
  std::vector<MarkovChain> chains;
  UpdateRule update_rule = UpdateRule::SingleFlip;
  CounterRng swap_rng;
};

TemperedEnsemble make_ensemble(const RbmParameters&, unsigned n_sites,
                               unsigned n_chains, UpdateRule rule,
                               std::uint64_t seed);

// Sweep every chain once (concurrently; per-chain private streams keep the
// result independent of scheduling).
void sweep_ensemble(TemperedEnsemble&, const RbmParameters&);

// Odd pairs then even pairs attempt configuration swaps.
void tempering_exchange(TemperedEnsemble&, const RbmParameters&);

// n_samples configurations off the beta = 1 chain, `sweeps_between` sweeps
// (each followed by one tempering exchange) apart.
std::vector<SpinConfiguration> draw_batch(TemperedEnsemble&,
                                          const RbmParameters&,
                                          std::size_t n_samples,
                                          unsigned sweeps_between);

// Prefix sums of |psi(x)|^2 over the sector in canonical order, with a
// shared max-log shift so the table is overflow-safe.
struct ExactSamplerTable {
  std::vector<double> cumulative;
  double total = 0.0;
};

ExactSamplerTable build_exact_table(const RbmParameters&, const BasisSector&);
// Same table from precomputed 2*Re(log psi) values (supervised models reuse
// this path with f-values).
ExactSamplerTable table_from_log_weights(const std::vector<double>& logw);

SpinConfiguration exact_sample(const ExactSamplerTable&, const BasisSector&,
                               CounterRng&);
// Index form used when the caller owns the enumeration.
std::size_t exact_sample_index(const ExactSamplerTable&, CounterRng&);

}  // namespace nqs
