#include "nqs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "nqs/ed.hpp"
#include "nqs/errors.hpp"
#include "nqs/kernels.hpp"
#include "nqs/linalg.hpp"
#include "nqs/parallel.hpp"

namespace nqs {

namespace {

constexpr std::size_t kBlocks = 8;     // fixed reduction partition
constexpr std::size_t kPanelRows = 48;  // samples per herk flush

// Per-block accumulator: panel-buffered Hermitian rank-k updates for S plus
// running sums for f and the means. Weighted with real weights.
struct ObsAccumulator {
  std::size_t n = 0;
  std::vector<cplx> s;       // n x n, upper triangle accumulated
  std::vector<cplx> f_bar;   // sum w * conj(E_loc) * O
  std::vector<cplx> mean_o;  // sum w * O
  cplx sum_e{0.0, 0.0};
  double sum_e2 = 0.0;
  double sum_w = 0.0;
  std::vector<cplx> panel;   // kPanelRows x n
  std::vector<double> wrow;
  std::size_t filled = 0;

  explicit ObsAccumulator(std::size_t n_params) : n(n_params) {
    s.assign(n * n, cplx(0.0, 0.0));
    f_bar.assign(n, cplx(0.0, 0.0));
    mean_o.assign(n, cplx(0.0, 0.0));
    panel.resize(kPanelRows * n);
    wrow.resize(kPanelRows);
  }

  cplx* next_row() { return panel.data() + filled * n; }

  void commit(double w, cplx e_loc) {
    const cplx* row = next_row();
    wrow[filled] = w;
    ++filled;
    kernels::caxpy(n, w * std::conj(e_loc), row, f_bar.data());
    kernels::raxpy(n, w, row, mean_o.data());
    sum_e += w * e_loc;
    sum_e2 += w * std::norm(e_loc);
    sum_w += w;
    if (filled == kPanelRows) flush();
  }

  void flush() {
    if (filled == 0) return;
    kernels::herk_upper(n, filled, wrow.data(), panel.data(), s.data());
    filled = 0;
  }

  void merge_into(ObsAccumulator& dst) const {
    for (std::size_t i = 0; i < s.size(); ++i) dst.s[i] += s[i];
    for (std::size_t i = 0; i < n; ++i) dst.f_bar[i] += f_bar[i];
    for (std::size_t i = 0; i < n; ++i) dst.mean_o[i] += mean_o[i];
    dst.sum_e += sum_e;
    dst.sum_e2 += sum_e2;
    dst.sum_w += sum_w;
  }
};

SrObservables finalize(ObsAccumulator& total, std::size_t n_samples) {
  const std::size_t n = total.n;
  total.flush();
  const double wtot = total.sum_w;
  SrObservables obs;
  obs.n_params = n;
  obs.n_samples = n_samples;
  obs.s = std::move(total.s);
  obs.f.assign(n, cplx(0.0, 0.0));
  for (auto& v : obs.s) v /= wtot;
  const cplx e_mean = total.sum_e / wtot;
  std::vector<cplx> o_mean(total.mean_o);
  for (auto& v : o_mean) v /= wtot;
  // S -= conj(<O>) <O>^T (upper triangle), then mirror to the lower half.
  const double minus_one = -1.0;
  kernels::herk_upper(n, 1, &minus_one, o_mean.data(), obs.s.data());
  for (std::size_t i = 0; i < n; ++i) {
    obs.s[i * n + i] = cplx(obs.s[i * n + i].real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j)
      obs.s[j * n + i] = std::conj(obs.s[i * n + j]);
  }
  // f_i = <E_loc O_i^*> - <E_loc> <O_i^*>: the Wirtinger gradient of <H>
  // with respect to conj(theta). The conjugate pairing is not a descent
  // direction for complex parameters.
  for (std::size_t i = 0; i < n; ++i)
    obs.f[i] =
        std::conj(total.f_bar[i] / wtot) - e_mean * std::conj(o_mean[i]);
  obs.energy_mean = e_mean;
  const double var = total.sum_e2 / wtot - std::norm(e_mean);
  obs.energy_std = var > 0.0 ? std::sqrt(var) : 0.0;
  return obs;
}

void fill_o_row(cplx* row, SpinConfiguration x, const cplx* tanh_chi,
                unsigned n_vis, unsigned n_hid) {
  for (unsigned i = 0; i < n_vis; ++i)
    row[i] = cplx(static_cast<double>(x.spin(i)), 0.0);
  for (unsigned j = 0; j < n_hid; ++j) row[n_vis + j] = tanh_chi[j];
  cplx* wblock = row + n_vis + n_hid;
  for (unsigned i = 0; i < n_vis; ++i) {
    const double xi = static_cast<double>(x.spin(i));
    for (unsigned j = 0; j < n_hid; ++j) wblock[i * n_hid + j] = xi * tanh_chi[j];
  }
}

}  // namespace

SrObservables estimate_observables_mc(
    const XyzChainModel& model, const RbmParameters& params,
    const std::vector<SpinConfiguration>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const std::size_t n = params.n_params();
  const double w = 1.0 / static_cast<double>(samples.size());

  std::vector<ObsAccumulator> acc;
  acc.reserve(kBlocks);
  for (std::size_t b = 0; b < kBlocks; ++b) acc.emplace_back(n);

  parallel_blocks(kBlocks, [&](std::size_t blk) {
    const auto [lo, hi] = block_range(samples.size(), kBlocks, blk);
    ObsAccumulator& a = acc[blk];
    std::vector<cplx> tanh_chi(params.n_hidden);
    for (std::size_t sidx = lo; sidx < hi; ++sidx) {
      const ActivationLookup lk = make_lookup(params, samples[sidx]);
      for (unsigned j = 0; j < params.n_hidden; ++j)
        tanh_chi[j] = tanh_stable(lk.chi[j]);
      fill_o_row(a.next_row(), samples[sidx], tanh_chi.data(),
                 params.n_visible, params.n_hidden);
      const cplx e_loc = local_energy(model, params, lk);
      a.commit(w, e_loc);
    }
    a.flush();
  });

  for (std::size_t b = 1; b < kBlocks; ++b) acc[b].merge_into(acc[0]);
  return finalize(acc[0], samples.size());
}

SrObservables estimate_observables_exact(const XyzChainModel& model,
                                         const RbmParameters& params,
                                         const BasisSector& sector) {
  const std::size_t dim = sector.size;
  const std::size_t n = params.n_params();
  const unsigned n_vis = params.n_visible, n_hid = params.n_hidden;

  // Pass 1: activations, tanh and log psi for the whole sector.
  std::vector<cplx> tanh_all(dim * n_hid);
  std::vector<cplx> logpsi(dim);
  const std::size_t scan_blocks = std::max<std::size_t>(1, 4 * max_threads());
  parallel_blocks(scan_blocks, [&](std::size_t blk) {
    const auto [lo, hi] = block_range(dim, scan_blocks, blk);
    std::vector<cplx> chi(n_hid);
    for (std::size_t r = lo; r < hi; ++r) {
      const SpinConfiguration x = config_at(r, sector);
      chi.assign(params.b.begin(), params.b.end());
      cplx lp(0.0, 0.0);
      for (unsigned i = 0; i < n_vis; ++i) {
        const double xi = static_cast<double>(x.spin(i));
        lp += xi * params.a[i];
        kernels::raxpy(n_hid, xi, params.w.data() + i * n_hid, chi.data());
      }
      cplx* trow = tanh_all.data() + r * n_hid;
      for (unsigned j = 0; j < n_hid; ++j) {
        lp += log2cosh(chi[j]);
        trow[j] = tanh_stable(chi[j]);
      }
      logpsi[r] = lp;
    }
  });

  // Born weights with a shared max-log shift.
  double shift = -1e300;
  for (const cplx& lp : logpsi) shift = std::max(shift, 2.0 * lp.real());
  std::vector<double> weight(dim);
  double z = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    weight[r] = std::exp(2.0 * logpsi[r].real() - shift);
    z += weight[r];
  }
  for (auto& p : weight) p /= z;

  // Pass 2: O rows, local energies via the log psi table, accumulation.
  std::vector<ObsAccumulator> acc;
  acc.reserve(kBlocks);
  for (std::size_t b = 0; b < kBlocks; ++b) acc.emplace_back(n);

  parallel_blocks(kBlocks, [&](std::size_t blk) {
    const auto [lo, hi] = block_range(dim, kBlocks, blk);
    ObsAccumulator& a = acc[blk];
    std::vector<Connection> conns;
    for (std::size_t r = lo; r < hi; ++r) {
      // Negligible-weight configurations cannot move any average, but their
      // amplitude ratios can overflow; skip them before forming E_loc.
      if (weight[r] <= 1e-250) continue;
      const SpinConfiguration x = config_at(r, sector);
      fill_o_row(a.next_row(), x, tanh_all.data() + r * n_hid, n_vis, n_hid);
      local_connections(model, x, conns);
      cplx e_loc(0.0, 0.0);
      for (const auto& c : conns) {
        if (c.flip_mask == 0) {
          e_loc += c.element;
          continue;
        }
        const SpinConfiguration xp = x.flipped(c.flip_mask);
        if (!sector_contains(sector, xp))
          throw SectorError("connection leaves the sector");
        const std::uint64_t rp = sector_index(xp, sector);
        e_loc += c.element * std::exp(logpsi[rp] - logpsi[r]);
      }
      a.commit(weight[r], e_loc);
    }
    a.flush();
  });

  for (std::size_t b = 1; b < kBlocks; ++b) acc[b].merge_into(acc[0]);
  return finalize(acc[0], dim);
}

double lambda_at(const OptimizerSchedule& s, unsigned epoch) {
  return std::max(s.lambda0 * std::pow(s.lambda_decay, epoch), s.lambda_min);
}

void sr_step(RbmParameters& params, const SrObservables& obs,
             const OptimizerSchedule& schedule, unsigned epoch,
             SrState& state) {
  const std::size_t n = obs.n_params;
  if (n != params.n_params())
    throw std::invalid_argument("observable dimensions do not match");

  const std::vector<cplx>* f_eff = &obs.f;
  const std::vector<cplx>* s_eff = &obs.s;
  if (schedule.beta1 > 0.0) {
    if (!state.has_avg) {
      state.f_avg = obs.f;
    } else {
      for (std::size_t i = 0; i < n; ++i)
        state.f_avg[i] =
            (1.0 - schedule.beta1) * state.f_avg[i] + schedule.beta1 * obs.f[i];
    }
    f_eff = &state.f_avg;
  }
  if (schedule.beta2 > 0.0) {
    if (!state.has_avg) {
      state.s_avg = obs.s;
    } else {
      for (std::size_t i = 0; i < n * n; ++i)
        state.s_avg[i] =
            (1.0 - schedule.beta2) * state.s_avg[i] + schedule.beta2 * obs.s[i];
    }
    s_eff = &state.s_avg;
  }
  state.has_avg = true;

  std::vector<cplx> delta(n);
  const auto attempt = [&](double lambda) -> bool {
    std::vector<cplx> m(*s_eff);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] += lambda;
    if (!linalg::solve_hermitian_cholesky(n, m, f_eff->data(), delta.data()))
      linalg::solve_hermitian_pinv(n, m, f_eff->data(), delta.data());
    for (const cplx& d : delta)
      if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) return false;
    return true;
  };

  const double lambda = lambda_at(schedule, epoch);
  if (!attempt(lambda) && !attempt(10.0 * lambda))
    throw SingularUpdateError("singular update at epoch " +
                              std::to_string(epoch));
  params.apply_update(delta, schedule.eta);
}

BasisSector training_sector(const TrainingRun& run) {
  return make_sector(run.sampler.update == UpdateRule::Exchange
                         ? SectorKind::ZeroMagnetization
                         : SectorKind::Full,
                     run.model.n_sites);
}

TrainingResult run_training(const TrainingRun& run,
                            const RbmParameters* warm_start) {
  const BasisSector sector = training_sector(run);
  TrainingResult result;

  if (run.ed_reference)
    result.reference_energy = std::isfinite(run.reference_energy)
                                  ? run.reference_energy
                                  : lanczos_ground(run.model, sector).energy;

  CounterRng init_rng(run.seed, 0x1417ull);
  result.params = warm_start
                      ? *warm_start
                      : init_random(run.model.n_sites, run.alpha, run.sigma,
                                    init_rng);
  const std::size_t n_samples = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(
             run.sampler.samples_multiplier *
             static_cast<double>(result.params.n_params()))));

  TemperedEnsemble ensemble;
  CounterRng exact_rng(run.seed, 0xe5ac7ull);
  if (run.method == Method::SR &&
      run.sampler.kind == SamplerSettings::Kind::Mcmc) {
    ensemble = make_ensemble(result.params, run.model.n_sites,
                             run.sampler.chains, run.sampler.update, run.seed);
    for (unsigned s = 0; s < run.sampler.burn_in; ++s) {
      sweep_ensemble(ensemble, result.params);
      tempering_exchange(ensemble, result.params);
    }
  }

  SrState state;
  result.curve.reserve(run.schedule.epochs);
  std::uint64_t prev_accept = 0, prev_prop = 0;

  for (unsigned epoch = 0; epoch < run.schedule.epochs; ++epoch) {
    SrObservables obs;
    double acceptance = 1.0;
    if (run.method == Method::ER) {
      obs = estimate_observables_exact(run.model, result.params, sector);
    } else if (run.sampler.kind == SamplerSettings::Kind::Exact) {
      const ExactSamplerTable table =
          build_exact_table(result.params, sector);
      std::vector<SpinConfiguration> samples;
      samples.reserve(n_samples);
      for (std::size_t s = 0; s < n_samples; ++s)
        samples.push_back(exact_sample(table, sector, exact_rng));
      obs = estimate_observables_mc(run.model, result.params, samples);
    } else {
      const std::vector<SpinConfiguration> samples = draw_batch(
          ensemble, result.params, n_samples, run.sampler.sweeps_between);
      obs = estimate_observables_mc(run.model, result.params, samples);
      const MarkovChain& cold = ensemble.chains.back();
      const std::uint64_t da = cold.accept_count - prev_accept;
      const std::uint64_t dp = cold.proposal_count - prev_prop;
      prev_accept = cold.accept_count;
      prev_prop = cold.proposal_count;
      acceptance = dp ? static_cast<double>(da) / static_cast<double>(dp) : 1.0;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.energy = obs.energy_mean;
    rec.energy_std = obs.energy_std;
    rec.acceptance = acceptance;
    rec.lambda = lambda_at(run.schedule, epoch);
    if (run.ed_reference)
      rec.norm_energy = (obs.energy_mean.real() - result.reference_energy) /
                        std::abs(result.reference_energy);
    result.curve.push_back(rec);

    sr_step(result.params, obs, run.schedule, epoch, state);

    if (!run.checkpoint_dir.empty() && run.checkpoint_every > 0 &&
        (epoch + 1) % run.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_%06u.rbm", epoch + 1);
      save_rbm(result.params,
               (std::filesystem::path(run.checkpoint_dir) / name).string());
    }
  }
  return result;
}

AnnealResult anneal(const TrainingRun& base, const RbmParameters& start,
                    const std::vector<std::vector<double>>& parameter_path,
                    unsigned epochs_per_step) {
  if (parameter_path.empty())
    throw std::invalid_argument("empty annealing path");
  AnnealResult result;
  result.params = start;
  unsigned epoch_offset = 0;
  for (const auto& point : parameter_path) {
    TrainingRun step = base;
    step.model = make_model(base.model.name, point, base.model.n_sites);
    step.schedule.epochs = epochs_per_step;
    const TrainingResult r = run_training(step, &result.params);
    result.params = r.params;
    AnnealPoint ap;
    ap.model_params = point;
    ap.energy = r.curve.back().energy.real();
    ap.norm_energy = r.curve.back().norm_energy;
    result.points.push_back(ap);
    for (EpochRecord rec : r.curve) {
      rec.epoch += epoch_offset;
      result.curve.push_back(rec);
    }
    epoch_offset += epochs_per_step;
  }
  return result;
}

}  // namespace nqs
