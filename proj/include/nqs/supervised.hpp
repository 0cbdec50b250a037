#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/convnet.hpp"
#include "nqs/model.hpp"
#include "nqs/rng.hpp"

namespace nqs {

// Energy-based amplitude model p_theta(x) = exp(f_theta(x)) / Z over the
// sector. Cross-entropy against p_data; the loss is evaluated exactly, the
// gradient from `minibatch` exact samples of each distribution
// (minibatch == 0 computes both expectations exactly).
struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

LossGradient amplitude_loss_and_gradient(const ConvNetParameters&,
                                         std::span<const double> data_probs,
                                         const BasisSector&,
                                         std::size_t minibatch, CounterRng&);

// Classical Fisher matrix of p_theta from `minibatch` exact samples
// (minibatch == 0: exact sums). Full symmetric storage.
std::vector<double> fisher_matrix(const ConvNetParameters&, const BasisSector&,
                                  std::size_t minibatch, CounterRng&);

struct NgdState {
  std::vector<double> g_avg;
  std::vector<double> f_avg;
};

// theta <- theta - eta (F_n + lambda I)^{-1} g_n with
// g_n = beta1 g_{n-1} + (1-beta1) g and F_n likewise (zero-initialized
// averages); Cholesky with pseudo-inverse fallback and one lambda x10 retry.
void ngd_update(ConvNetParameters&, const std::vector<double>& g,
                const std::vector<double>& fisher, double eta, double lambda,
                double beta1, double beta2, NgdState&);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

void adam_update(ConvNetParameters&, const std::vector<double>& g, AdamState&,
                 double eta = 2.5e-5, double b1 = 0.9, double b2 = 0.999,
                 double eps = 1e-8);

// Binary cross entropy of P[psi(x) > 0] = sigmoid(f_theta(x)) over a
// minibatch drawn from p_data (minibatch == 0: exact weighted sums).
LossGradient sign_loss_and_gradient(const ConvNetParameters&,
                                    std::span<const std::int8_t> signs,
                                    std::span<const double> data_probs,
                                    std::size_t minibatch, CounterRng&);

enum class ReconstructionKind { Amplitude, Sign };

// F = <psi_GS | psi_recon>^2. Amplitude reconstruction assumes true signs
// (overlap = sum |psi| e^{f/2} / sqrt(Z)); sign reconstruction assumes true
// amplitudes (overlap = sum sgn(f) |psi(x)| psi(x)).
double reconstruction_fidelity(ReconstructionKind, const ConvNetParameters&,
                               std::span<const double> gs_vector,
                               const BasisSector&);

// Sign targets of the ground state, optionally pre-multiplied by the
// Marshall factor (-1)^(# down spins on even sites); the output is oriented
// so the probability-weighted majority of targets is +1.
std::vector<std::int8_t> marshall_sign_target(std::span<const double> gs,
                                              const BasisSector&,
                                              bool apply_rule);

double marshall_factor(SpinConfiguration x);

// Jz = 0 when the model conserves it and N is even, else the full space.
BasisSector natural_sector(const XyzChainModel&);

struct SupervisedRun {
  XyzChainModel model;
  unsigned width = 16;
  ReconstructionKind kind = ReconstructionKind::Amplitude;
  bool sign_rule = false;  // sign training only
  unsigned epochs = 2000;
  std::size_t minibatch = 1024;   // 32 for sign training
  double eta = 1e-4;              // 2.5e-5 for sign training
  double beta1 = 0.9;             // NGD momentum (amplitude)
  double beta2 = 0.999;           // NGD Fisher momentum (amplitude)
  double lambda = 1e-3;           // NGD shift
  unsigned eval_every = 50;
  std::uint64_t seed = 1;
};

struct SupervisedCurvePoint {
  unsigned epoch = 0;
  double loss = 0.0;
  double infidelity = 1.0;
};

struct SupervisedResult {
  std::vector<SupervisedCurvePoint> curve;
  ConvNetParameters params;
  double final_infidelity = 1.0;
  double ground_energy = 0.0;
};

SupervisedResult run_supervised(const SupervisedRun&);

}  // namespace nqs
