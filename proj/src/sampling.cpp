#include "nqs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nqs/errors.hpp"
#include "nqs/parallel.hpp"

namespace nqs {

namespace {
constexpr unsigned kRefreshInterval = 100;
}

MarkovChain make_chain(const RbmParameters& params, unsigned n_sites,
                       double beta, UpdateRule rule, std::uint64_t seed,
                       std::uint64_t stream) {
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("beta must be in (0, 1]");
  MarkovChain chain;
  chain.beta = beta;
  chain.rng = CounterRng(seed, stream);
  SpinConfiguration x{0, n_sites};
  if (rule == UpdateRule::Exchange) {
    // Equal number of up and down spins.
    if (n_sites % 2 != 0)
      throw std::invalid_argument("exchange updates require even N");
    std::vector<unsigned> sites(n_sites);
    for (unsigned i = 0; i < n_sites; ++i) sites[i] = i;
    for (unsigned i = n_sites - 1; i > 0; --i)
      std::swap(sites[i], sites[chain.rng.uniform_int(i + 1)]);
    for (unsigned i = 0; i < n_sites / 2; ++i) x.bits |= (1u << sites[i]);
  } else {
    x.bits = static_cast<std::uint32_t>(chain.rng.next_u64()) &
             ((n_sites == 32) ? 0xFFFFFFFFu : ((1u << n_sites) - 1u));
  }
  chain.config = x;
  chain.lookup = make_lookup(params, x);
  return chain;
}

void metropolis_sweep(MarkovChain& chain, const RbmParameters& params,
                      UpdateRule rule) {
  const unsigned n = chain.config.n_sites;
  unsigned flips[2];
  for (unsigned step = 0; step < n; ++step) {
    unsigned n_flips = 0;
    if (rule == UpdateRule::SingleFlip) {
      flips[0] = static_cast<unsigned>(chain.rng.uniform_int(n));
      n_flips = 1;
    } else {
      const unsigned i = static_cast<unsigned>(chain.rng.uniform_int(n));
      unsigned j = static_cast<unsigned>(chain.rng.uniform_int(n - 1));
      if (j >= i) ++j;
      if (chain.config.spin(i) == chain.config.spin(j)) {
        // Exchanging equal spins proposes the current configuration.
        ++chain.proposal_count;
        ++chain.accept_count;
        chain.rng.uniform();  // keep the draw pattern uniform across steps
        continue;
      }
      flips[0] = i;
      flips[1] = j;
      n_flips = 2;
    }
    const double d =
        log_ratio_re(params, chain.lookup,
                     std::span<const unsigned>(flips, n_flips));
    const double p_accept = std::min(1.0, std::exp(2.0 * chain.beta * d));
    ++chain.proposal_count;
    const double u = chain.rng.uniform();
    if (u < p_accept) {
      apply_flips(chain.lookup, params,
                  std::span<const unsigned>(flips, n_flips));
      chain.config = chain.lookup.bound_config;
      ++chain.accept_count;
    }
  }
  if (++chain.sweeps_since_refresh >= kRefreshInterval) {
    refresh_lookup(chain.lookup, params, chain.config);
    chain.sweeps_since_refresh = 0;
  }
}

double swap_probability(double beta_i, double beta_j, double re_e_i,
                        double re_e_j) {
  // Joint weight is prod_k exp(2 beta_k Re E(x_k)); detailed balance for the
  // configuration swap gives exp(2 (beta_i - beta_j)(Re E_j - Re E_i)). Note
  // the quasi-energy enters with + sign in the weight, unlike a Boltzmann
  // factor, so the familiar (beta_i - beta_j)(E_i - E_j) form flips sign.
  return std::min(1.0, std::exp(2.0 * (beta_i - beta_j) * (re_e_j - re_e_i)));
}

TemperedEnsemble make_ensemble(const RbmParameters& params, unsigned n_sites,
                               unsigned n_chains, UpdateRule rule,
                               std::uint64_t seed) {
  if (n_chains < 1) throw std::invalid_argument("need at least one chain");
  TemperedEnsemble e;
  e.update_rule = rule;
  e.swap_rng = CounterRng(seed, 0x5afeull);
  e.chains.reserve(n_chains);
  for (unsigned i = 1; i <= n_chains; ++i)
    e.chains.push_back(make_chain(params, n_sites,
                                  static_cast<double>(i) / n_chains, rule,
                                  seed, i));
  return e;
}

void sweep_ensemble(TemperedEnsemble& e, const RbmParameters& params) {
  parallel_blocks(e.chains.size(), [&](std::size_t c) {
    metropolis_sweep(e.chains[c], params, e.update_rule);
  });
}

namespace {

double re_quasi_energy(const RbmParameters& params, const MarkovChain& chain) {
  double acc = 0.0;
  for (unsigned i = 0; i < params.n_visible; ++i)
    acc += chain.config.spin(i) * params.a[i].real();
  for (unsigned j = 0; j < params.n_hidden; ++j)
    acc += re_log2cosh(chain.lookup.chi[j]);
  return acc;  // Re E + M log 2; the constant cancels in differences
}

}  // namespace

void tempering_exchange(TemperedEnsemble& e, const RbmParameters& params) {
  const std::size_t n = e.chains.size();
  if (n < 2) return;
  std::vector<double> re_e(n);
  for (std::size_t i = 0; i < n; ++i) re_e[i] = re_quasi_energy(params, e.chains[i]);
  const auto attempt = [&](std::size_t i) {
    const double p = swap_probability(e.chains[i].beta, e.chains[i + 1].beta,
                                      re_e[i], re_e[i + 1]);
    if (e.swap_rng.uniform() < p) {
      std::swap(e.chains[i].config, e.chains[i + 1].config);
      std::swap(e.chains[i].lookup, e.chains[i + 1].lookup);
      std::swap(re_e[i], re_e[i + 1]);
    }
  };
  for (std::size_t i = 0; i + 1 < n; i += 2) attempt(i);      // odd pairs (1-based)
  for (std::size_t i = 1; i + 1 < n; i += 2) attempt(i);      // even pairs
}

std::vector<SpinConfiguration> draw_batch(TemperedEnsemble& e,
                                          const RbmParameters& params,
                                          std::size_t n_samples,
                                          unsigned sweeps_between) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::vector<SpinConfiguration> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (unsigned t = 0; t < sweeps_between; ++t) {
      sweep_ensemble(e, params);
      tempering_exchange(e, params);
    }
    out.push_back(e.chains.back().config);
  }
  return out;
}

ExactSamplerTable table_from_log_weights(const std::vector<double>& logw) {
  double shift = -1e300;
  for (double v : logw) shift = std::max(shift, v);
  if (!(shift > -1e300))
    throw DegenerateDistributionError("all amplitudes vanish");
  ExactSamplerTable table;
  table.cumulative.resize(logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    acc += std::exp(logw[i] - shift);
    table.cumulative[i] = acc;
  }
  table.total = acc;
  if (!(table.total > 0.0))
    throw DegenerateDistributionError("all amplitudes vanish");
  return table;
}

ExactSamplerTable build_exact_table(const RbmParameters& params,
                                    const BasisSector& sector) {
  if (sector.size > (std::uint64_t{1} << 21))
    throw std::invalid_argument("sector too large for the exact sampler");
  std::vector<double> logw(sector.size);
  const std::size_t nblocks = std::max<std::size_t>(1, 4 * max_threads());
  parallel_blocks(nblocks, [&](std::size_t blk) {
    const auto [lo, hi] = block_range(sector.size, nblocks, blk);
    for (std::size_t i = lo; i < hi; ++i)
      logw[i] = 2.0 * log_psi(params, config_at(i, sector)).real();
  });
  return table_from_log_weights(logw);
}

std::size_t exact_sample_index(const ExactSamplerTable& table,
                               CounterRng& rng) {
  const double u = rng.uniform() * table.total;
  const auto it = std::upper_bound(table.cumulative.begin(),
                                   table.cumulative.end(), u);
  return std::min<std::size_t>(
      static_cast<std::size_t>(it - table.cumulative.begin()),
      table.cumulative.size() - 1);
}

SpinConfiguration exact_sample(const ExactSamplerTable& table,
                               const BasisSector& sector, CounterRng& rng) {
  return config_at(exact_sample_index(table, rng), sector);
}

}  // namespace nqs
