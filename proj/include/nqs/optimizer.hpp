#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/model.hpp"
#include "nqs/rbm.hpp"
#include "nqs/sampling.hpp"

namespace nqs {

// Covariance matrix, force vector and energy statistics of one step.
// S is stored full (Hermitian, mirrored from the accumulated upper triangle).
struct SrObservables {
  std::size_t n_params = 0;
  std::vector<cplx> s;  // n x n row-major
  std::vector<cplx> f;  // n
  cplx energy_mean{0.0, 0.0};
  double energy_std = 0.0;
  std::size_t n_samples = 0;
};

// S and f under the empirical measure of the samples.
SrObservables estimate_observables_mc(const XyzChainModel&,
                                      const RbmParameters&,
                                      const std::vector<SpinConfiguration>&);

// Same formulas under the exact Born distribution over the sector.
SrObservables estimate_observables_exact(const XyzChainModel&,
                                         const RbmParameters&,
                                         const BasisSector&);

struct OptimizerSchedule {
  double eta = 0.02;
  double lambda0 = 1.0;
  double lambda_decay = 0.9;
  double lambda_min = 1e-3;
  double beta1 = 0.0;  // running-average weight for f (0 = off)
  double beta2 = 0.0;  // running-average weight for S (0 = off)
  unsigned epochs = 2500;
};

double lambda_at(const OptimizerSchedule&, unsigned epoch);

// Running averages carried between sr_step calls.
struct SrState {
  std::vector<cplx> f_avg;
  std::vector<cplx> s_avg;
  bool has_avg = false;
};

// theta <- theta - eta (S_n + lambda_n I)^{-1} f_n with the scheduled shift;
// Cholesky first, pseudo-inverse fallback, one lambda x10 retry.
void sr_step(RbmParameters&, const SrObservables&, const OptimizerSchedule&,
             unsigned epoch, SrState&);

enum class Method { SR, ER };

struct SamplerSettings {
  enum class Kind { Mcmc, Exact };
  Kind kind = Kind::Mcmc;
  UpdateRule update = UpdateRule::Exchange;
  unsigned chains = 16;
  unsigned sweeps_between = 1;
  unsigned burn_in = 1000;
  double samples_multiplier = 1.0;  // samples per epoch = mult * |theta|
};

struct TrainingRun {
  XyzChainModel model;
  unsigned alpha = 3;
  double sigma = 1e-3;
  Method method = Method::ER;
  OptimizerSchedule schedule;
  SamplerSettings sampler;
  bool ed_reference = true;
  // Precomputed reference energy (NaN: compute it here). Lets a sweep runner
  // diagonalize once per parameter point and share it across instances.
  double reference_energy = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 1;
  std::string checkpoint_dir;  // empty: no periodic checkpoints
  unsigned checkpoint_every = 100;
};

struct EpochRecord {
  unsigned epoch = 0;
  cplx energy{0.0, 0.0};
  double energy_std = 0.0;
  double norm_energy = std::numeric_limits<double>::quiet_NaN();
  double acceptance = 1.0;
  double lambda = 0.0;
};

using LearningCurve = std::vector<EpochRecord>;

struct TrainingResult {
  RbmParameters params;
  LearningCurve curve;
  double reference_energy = std::numeric_limits<double>::quiet_NaN();
};

// The sector is Jz = 0 for exchange updates and the full space otherwise,
// for the exact sums, the exact sampler and the ED reference alike.
BasisSector training_sector(const TrainingRun&);

TrainingResult run_training(const TrainingRun&,
                            const RbmParameters* warm_start = nullptr);

struct AnnealPoint {
  std::vector<double> model_params;
  double energy = 0.0;
  double norm_energy = std::numeric_limits<double>::quiet_NaN();
};

struct AnnealResult {
  std::vector<AnnealPoint> points;
  LearningCurve curve;  // concatenated per-step curves
  RbmParameters params;
};

// Warm-started continuation along a path of model parameters,
// epochs_per_step optimization epochs at each point.
AnnealResult anneal(const TrainingRun& base, const RbmParameters& start,
                    const std::vector<std::vector<double>>& parameter_path,
                    unsigned epochs_per_step);

}  // namespace nqs
