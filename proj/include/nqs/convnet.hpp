#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/rng.hpp"

namespace nqs {

// Symmetric convolutional network: Conv-1 (1 -> W/2 channels), cosine
// activation, Conv-2 (W/2 -> W), leaky hard-tanh, site mean, linear readout.
// Periodic padding, kernel length floor(N/2)+1, no biases anywhere; the
// output is exactly invariant under translation and global spin flip.
struct ConvNetParameters {
  unsigned n_sites = 0;
  unsigned width = 0;  // W, even
  unsigned ksize = 0;  // floor(N/2) + 1
  std::vector<double> conv1;  // [W/2][K]
  std::vector<double> conv2;  // [W][W/2][K]
  std::vector<double> fc;     // [W]

  std::size_t n_params() const {
    return conv1.size() + conv2.size() + fc.size();
  }
  // Flat parameter order: conv1, conv2, fc.
  double* flat(std::size_t k);
  void axpy(double a, const std::vector<double>& g);  // params += a * g
};

// Zero-mean normal with std sqrt(2 / (fan_in + fan_out)) per layer.
ConvNetParameters convnet_init(unsigned n_sites, unsigned width,
                               std::uint64_t seed);

double leaky_hard_tanh(double x, double slope = 0.01);

double convnet_forward(const ConvNetParameters&, SpinConfiguration x);

// Reverse-mode gradient of the output; adds scale * grad into out[0..P).
void convnet_gradient(const ConvNetParameters&, SpinConfiguration x,
                      double scale, double* out);

void save_convnet(const ConvNetParameters&, const std::string& path);

}  // namespace nqs
