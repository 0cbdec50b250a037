#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nqs/ed.hpp"
#include "nqs/errors.hpp"
#include "nqs/linalg.hpp"
#include "nqs/optimizer.hpp"

using namespace nqs;

namespace {

RbmParameters random_params(unsigned n, unsigned alpha, double sigma,
                            std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return init_random(n, alpha, sigma, rng);
}

// Rayleigh quotient <psi|H|psi>/<psi|psi> from dense sums, independent of
// the estimator path.
double rayleigh(const XyzChainModel& m, const RbmParameters& p,
                const BasisSector& sector) {
  std::vector<cplx> amps(sector.size);
  double shift = -1e300;
  for (std::uint64_t i = 0; i < sector.size; ++i)
    shift = std::max(shift, log_psi(p, config_at(i, sector)).real());
  for (std::uint64_t i = 0; i < sector.size; ++i)
    amps[i] = std::exp(log_psi(p, config_at(i, sector)) - shift);
  cplx num(0.0);
  double den = 0.0;
  for (std::uint64_t i = 0; i < sector.size; ++i) {
    const auto pairs = connection_pairs(m, config_at(i, sector));
    for (const auto& [xp, h] : pairs)
      num += std::conj(amps[sector_index(xp, sector)]) * h * amps[i];
    den += std::norm(amps[i]);
  }
  return (num / den).real();
}

}  // namespace

TEST_CASE("exact estimator reproduces the dense Rayleigh quotient at N=8") {
  const auto m = make_model("xxz-sr", {0.7}, 8);
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 8);
  const auto p = random_params(8, 2, 0.3, 21);
  const auto obs = estimate_observables_exact(m, p, sector);
  CHECK(obs.energy_mean.real() ==
        doctest::Approx(rayleigh(m, p, sector)).epsilon(1e-10));
  CHECK(std::abs(obs.energy_mean.imag()) <= 1e-10);
}

TEST_CASE("S is Hermitian PSD with real nonnegative diagonal") {
  const auto m = make_model("txyz", {0.3, 1.2, -1.0, -1.0}, 6);
  const auto sector = make_sector(SectorKind::Full, 6);
  const auto p = random_params(6, 2, 0.4, 22);
  const auto obs = estimate_observables_exact(m, p, sector);
  const std::size_t n = obs.n_params;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(obs.s[i * n + i].imag() == 0.0);
    CHECK(obs.s[i * n + i].real() >= -1e-12);
    trace += obs.s[i * n + i].real();
    for (std::size_t j = i; j < n; ++j)
      CHECK(std::abs(obs.s[i * n + j] - std::conj(obs.s[j * n + i])) <= 1e-10);
  }
  std::vector<double> evals;
  {
    std::vector<cplx> a(obs.s);
    nqs::linalg::hermitian_eigh(n, a, evals, nullptr);
  }
  CHECK(evals.front() >= -1e-10 * std::max(1.0, trace));
}

TEST_CASE("stationarity: exact force vanishes on an exactly represented eigenstate") {
  // Zero-parameter RBM = uniform superposition = ferromagnetic Heisenberg
  // ground state (xxz-sr at Delta = -1).
  const auto m = make_model("xxz-sr", {-1.0}, 8);
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 8);
  const auto p = random_params(8, 2, 0.0, 23);
  const auto obs = estimate_observables_exact(m, p, sector);
  for (const auto& v : obs.f) CHECK(std::abs(v) <= 1e-8);

  // Same for the diagonal model, where the uniform state pairs odd moments.
  const auto diag = make_model("txyz", {0.0, 0.0, -1.0, -1.0}, 8);
  const auto obs2 =
      estimate_observables_exact(diag, p, make_sector(SectorKind::Full, 8));
  for (const auto& v : obs2.f) CHECK(std::abs(v) <= 1e-8);
}

TEST_CASE("MC estimator on the uniform state: whole sector = exact estimator") {
  const auto m = make_model("xxz", {0.5}, 6);
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 6);
  const auto p = random_params(6, 2, 0.0, 24);  // uniform Born distribution
  const auto samples = enumerate_sector(6, SectorKind::ZeroMagnetization);
  const auto mc = estimate_observables_mc(m, p, samples);
  const auto ex = estimate_observables_exact(m, p, sector);
  CHECK(std::abs(mc.energy_mean - ex.energy_mean) <= 1e-10);
  for (std::size_t i = 0; i < mc.f.size(); ++i)
    CHECK(std::abs(mc.f[i] - ex.f[i]) <= 1e-10);
  const std::size_t n = mc.n_params;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      CHECK(std::abs(mc.s[i * n + j] - ex.s[i * n + j]) <= 1e-10);
}

TEST_CASE("single repeated sample gives vanishing covariance and force") {
  const auto m = make_model("xxz", {1.0}, 6);
  const auto p = random_params(6, 2, 0.2, 25);
  const std::vector<SpinConfiguration> samples(64,
                                               SpinConfiguration{0b010101u, 6});
  const auto obs = estimate_observables_mc(m, p, samples);
  for (const auto& v : obs.f) CHECK(std::abs(v) <= 1e-12);
  for (const auto& v : obs.s) CHECK(std::abs(v) <= 1e-12);
  CHECK(obs.energy_std <= 1e-7);
}

TEST_CASE("sr_step: identity covariance reduces to plain gradient descent") {
  auto p = random_params(4, 1, 0.1, 26);
  const auto p0 = p;
  const std::size_t n = p.n_params();
  SrObservables obs;
  obs.n_params = n;
  obs.s.assign(n * n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) obs.s[i * n + i] = 1.0;
  obs.f.assign(n, cplx(0.0));
  obs.f[2] = cplx(0.5, -0.25);
  OptimizerSchedule sched;
  sched.eta = 0.1;
  sched.lambda0 = 0.0;
  sched.lambda_min = 0.0;
  SrState state;
  sr_step(p, obs, sched, 0, state);
  CHECK(std::abs(p.a[2] - (p0.a[2] - 0.1 * obs.f[2])) <= 1e-15);

  // f = 0 is a fixed point.
  obs.f[2] = cplx(0.0);
  auto q = p;
  sr_step(q, obs, sched, 1, state);
  CHECK(q.a == p.a);
  CHECK(q.w == p.w);
}

TEST_CASE("running averages follow the stated recursions") {
  auto p = random_params(2, 1, 0.1, 27);
  const std::size_t n = p.n_params();
  SrObservables obs;
  obs.n_params = n;
  obs.s.assign(n * n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) obs.s[i * n + i] = 1.0;
  obs.f.assign(n, cplx(1.0));
  OptimizerSchedule sched;
  sched.beta1 = 0.9;
  sched.beta2 = 0.9;
  sched.lambda0 = 0.0;
  sched.lambda_min = 1e-12;
  SrState state;
  sr_step(p, obs, sched, 0, state);  // first step: averages initialized to f, S
  for (const auto& v : state.f_avg) CHECK(std::abs(v - cplx(1.0)) <= 1e-15);
  SrObservables obs2 = obs;
  obs2.f.assign(n, cplx(0.0));
  sr_step(p, obs2, sched, 1, state);
  // f_1 = (1 - beta1) * 1 + beta1 * 0
  for (const auto& v : state.f_avg) CHECK(std::abs(v - cplx(0.1)) <= 1e-15);
}

TEST_CASE("singular-update error surfaces when the solve cannot recover") {
  auto p = random_params(2, 1, 0.1, 28);
  const std::size_t n = p.n_params();
  SrObservables obs;
  obs.n_params = n;
  obs.s.assign(n * n, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
  obs.f.assign(n, cplx(1.0));
  OptimizerSchedule sched;
  SrState state;
  CHECK_THROWS_AS(sr_step(p, obs, sched, 0, state), SingularUpdateError);
}

TEST_CASE("ER on xxz-sr converges to the ground state at N=8") {
  TrainingRun run;
  run.model = make_model("xxz-sr", {1.0}, 8);
  run.alpha = 2;
  run.method = Method::ER;
  run.schedule.epochs = 400;
  run.sampler.update = UpdateRule::Exchange;
  run.seed = 5;
  const auto result = run_training(run);
  CHECK(result.curve.size() == 400);
  CHECK(result.curve.back().norm_energy <= 1e-6);
  // Variational bound: every recorded energy sits above E0.
  for (const auto& rec : result.curve) CHECK(rec.norm_energy >= -1e-9);
  // Median energy over 20-epoch windows is non-increasing.
  std::vector<double> medians;
  for (std::size_t w = 0; w + 20 <= result.curve.size(); w += 20) {
    std::vector<double> vals;
    for (std::size_t i = w; i < w + 20; ++i)
      vals.push_back(result.curve[i].energy.real());
    std::nth_element(vals.begin(), vals.begin() + 10, vals.end());
    medians.push_back(vals[10]);
  }
  for (std::size_t i = 1; i < medians.size(); ++i)
    CHECK(medians[i] <= medians[i - 1] + 1e-9);
}

TEST_CASE("seed-fixed ER rerun reproduces the learning curve bit-identically") {
  TrainingRun run;
  run.model = make_model("xxz-sr", {1.5}, 6);
  run.alpha = 2;
  run.method = Method::ER;
  run.schedule.epochs = 25;
  run.sampler.update = UpdateRule::Exchange;
  run.seed = 77;
  const auto r1 = run_training(run);
  const auto r2 = run_training(run);
  REQUIRE(r1.curve.size() == r2.curve.size());
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    CHECK(r1.curve[i].energy == r2.curve[i].energy);
    CHECK(r1.curve[i].energy_std == r2.curve[i].energy_std);
  }
  CHECK(r1.params.w == r2.params.w);
}

TEST_CASE("SR with the exact sampler matches batch statistics expectations") {
  TrainingRun run;
  run.model = make_model("xxz-sr", {1.0}, 8);
  run.alpha = 2;
  run.method = Method::SR;
  run.sampler.kind = SamplerSettings::Kind::Exact;
  run.sampler.update = UpdateRule::Exchange;
  run.schedule.epochs = 150;
  run.seed = 6;
  const auto result = run_training(run);
  CHECK(result.curve.back().norm_energy < 5e-3);
}

TEST_CASE("anneal with a single path point equals warm-started training") {
  TrainingRun run;
  run.model = make_model("txyz-diamond", {1.01, 1.51, -1.0, -1.0}, 6);
  run.alpha = 2;
  run.method = Method::ER;
  run.schedule.epochs = 30;
  run.sampler.update = UpdateRule::SingleFlip;
  run.seed = 9;
  const auto base = run_training(run);

  const auto annealed =
      anneal(run, base.params, {{1.01, 1.51, -1.0, -1.0}}, 20);
  TrainingRun cont = run;
  cont.schedule.epochs = 20;
  const auto direct = run_training(cont, &base.params);
  REQUIRE(annealed.points.size() == 1);
  CHECK(annealed.points[0].energy ==
        doctest::Approx(direct.curve.back().energy.real()).epsilon(1e-12));
  CHECK(annealed.params.w == direct.params.w);
}

TEST_CASE("batch mean of E_loc lies within 3 standard errors of the Rayleigh quotient") {
  const auto m = make_model("xxz-sr", {1.0}, 10);
  const auto sector = make_sector(SectorKind::ZeroMagnetization, 10);
  const auto p = random_params(10, 2, 0.3, 31);
  auto ens = make_ensemble(p, 10, 16, UpdateRule::Exchange, 32);
  for (int s = 0; s < 1000; ++s) {
    sweep_ensemble(ens, p);
    tempering_exchange(ens, p);
  }
  const auto samples = draw_batch(ens, p, 4000, 1);
  const auto obs = estimate_observables_mc(m, p, samples);
  const double exact = rayleigh(m, p, sector);
  const double sem = obs.energy_std / std::sqrt(static_cast<double>(400.0));
  CHECK(std::abs(obs.energy_mean.real() - exact) < 3.0 * sem + 1e-9);
}
