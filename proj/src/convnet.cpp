#include "nqs/convnet.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nqs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSlope = 0.01;

// Compensated accumulator (two-sum). The site mean must not depend on which
// rotation of the ring the loop starts at, or translation invariance would
// only hold to roundoff; double-double accumulation makes the sum exact to
// ~2^-106, far below the final rounding.
struct DDSum {
  double hi = 0.0, lo = 0.0;
  void add(double x) {
    const double s = hi + x;
    const double b = s - hi;
    lo += (hi - (s - b)) + (x - b);
    hi = s;
  }
  double value() const { return hi + lo; }
};

struct Scratch {
  std::vector<double> x;   // N
  std::vector<double> h1;  // [W/2][N]
  std::vector<double> z1;  // [W/2][N]
  std::vector<double> h2;  // [W][N]
  std::vector<double> z2;  // [W][N]
  std::vector<double> pooled;  // W
};

thread_local Scratch g_scratch;

void forward_pass(const ConvNetParameters& p, SpinConfiguration xc,
                  Scratch& s) {
  const unsigned n = p.n_sites, w = p.width, c1 = w / 2, k = p.ksize;
  s.x.resize(n);
  for (unsigned i = 0; i < n; ++i) s.x[i] = static_cast<double>(xc.spin(i));
  s.h1.assign(std::size_t{c1} * n, 0.0);
  s.z1.resize(std::size_t{c1} * n);
  for (unsigned c = 0; c < c1; ++c) {
    const double* ker = p.conv1.data() + c * k;
    for (unsigned site = 0; site < n; ++site) {
      double acc = 0.0;
      for (unsigned t = 0; t < k; ++t) acc += ker[t] * s.x[(site + t) % n];
      s.h1[c * n + site] = acc;
      s.z1[c * n + site] = std::cos(kPi * acc);
    }
  }
  s.h2.assign(std::size_t{w} * n, 0.0);
  s.z2.resize(std::size_t{w} * n);
  for (unsigned o = 0; o < w; ++o) {
    for (unsigned c = 0; c < c1; ++c) {
      const double* ker = p.conv2.data() + (o * c1 + c) * k;
      for (unsigned site = 0; site < n; ++site) {
        double acc = 0.0;
        for (unsigned t = 0; t < k; ++t)
          acc += ker[t] * s.z1[c * n + (site + t) % n];
        s.h2[o * n + site] += acc;
      }
    }
    for (unsigned site = 0; site < n; ++site)
      s.z2[o * n + site] = leaky_hard_tanh(s.h2[o * n + site]);
  }
  s.pooled.resize(w);
  for (unsigned o = 0; o < w; ++o) {
    DDSum sum;
    for (unsigned site = 0; site < n; ++site) sum.add(s.z2[o * n + site]);
    s.pooled[o] = sum.value() / n;
  }
}

}  // namespace

double* ConvNetParameters::flat(std::size_t k) {
  if (k < conv1.size()) return conv1.data() + k;
  k -= conv1.size();
  if (k < conv2.size()) return conv2.data() + k;
  return fc.data() + (k - conv2.size());
}

void ConvNetParameters::axpy(double a, const std::vector<double>& g) {
  if (g.size() != n_params())
    throw std::invalid_argument("gradient length mismatch");
  std::size_t k = 0;
  for (auto& v : conv1) v += a * g[k++];
  for (auto& v : conv2) v += a * g[k++];
  for (auto& v : fc) v += a * g[k++];
}

ConvNetParameters convnet_init(unsigned n_sites, unsigned width,
                               std::uint64_t seed) {
  if (width < 4 || width % 2 != 0)
    throw std::invalid_argument("width must be even and >= 4");
  ConvNetParameters p;
  p.n_sites = n_sites;
  p.width = width;
  p.ksize = n_sites / 2 + 1;
  const unsigned c1 = width / 2, k = p.ksize;
  p.conv1.resize(std::size_t{c1} * k);
  p.conv2.resize(std::size_t{width} * c1 * k);
  p.fc.resize(width);
  CounterRng rng(seed, 0x90d7ull);
  const auto fill = [&rng](std::vector<double>& v, double fan_in,
                           double fan_out) {
    const double std = std::sqrt(2.0 / (fan_in + fan_out));
    for (auto& x : v) x = rng.normal(std);
  };
  fill(p.conv1, 1.0 * k, static_cast<double>(c1) * k);
  fill(p.conv2, static_cast<double>(c1) * k, static_cast<double>(width) * k);
  fill(p.fc, width, 1.0);
  return p;
}

double leaky_hard_tanh(double x, double slope) {
  if (x >= 1.0) return slope * (x - 1.0) + 1.0;
  if (x <= -1.0) return slope * (x + 1.0) - 1.0;
  return x;
}

double convnet_forward(const ConvNetParameters& p, SpinConfiguration xc) {
  if (xc.n_sites != p.n_sites)
    throw std::invalid_argument("configuration size mismatch");
  Scratch& s = g_scratch;
  forward_pass(p, xc, s);
  double out = 0.0;
  for (unsigned o = 0; o < p.width; ++o) out += p.fc[o] * s.pooled[o];
  return out;
}

void convnet_gradient(const ConvNetParameters& p, SpinConfiguration xc,
                      double scale, double* out) {
  const unsigned n = p.n_sites, w = p.width, c1 = w / 2, k = p.ksize;
  Scratch& s = g_scratch;
  forward_pass(p, xc, s);

  double* g_conv1 = out;
  double* g_conv2 = out + p.conv1.size();
  double* g_fc = out + p.conv1.size() + p.conv2.size();

  for (unsigned o = 0; o < w; ++o) g_fc[o] += scale * s.pooled[o];

  // dL/dh2[o][site] = scale * fc[o]/N * lht'(h2)
  thread_local std::vector<double> dh2, dz1, dh1;
  dh2.resize(std::size_t{w} * n);
  for (unsigned o = 0; o < w; ++o) {
    const double base = scale * p.fc[o] / n;
    for (unsigned site = 0; site < n; ++site) {
      const double h = s.h2[o * n + site];
      dh2[o * n + site] = base * (std::abs(h) < 1.0 ? 1.0 : kSlope);
    }
  }
  dz1.assign(std::size_t{c1} * n, 0.0);
  for (unsigned o = 0; o < w; ++o) {
    for (unsigned c = 0; c < c1; ++c) {
      double* gk = g_conv2 + (o * c1 + c) * k;
      for (unsigned site = 0; site < n; ++site) {
        const double d = dh2[o * n + site];
        if (d == 0.0) continue;
        const double* ker = p.conv2.data() + (o * c1 + c) * k;
        for (unsigned t = 0; t < k; ++t) {
          const unsigned u = (site + t) % n;
          gk[t] += d * s.z1[c * n + u];
          dz1[c * n + u] += d * ker[t];
        }
      }
    }
  }
  dh1.resize(std::size_t{c1} * n);
  for (unsigned c = 0; c < c1; ++c)
    for (unsigned site = 0; site < n; ++site)
      dh1[c * n + site] = dz1[c * n + site] *
                          (-kPi * std::sin(kPi * s.h1[c * n + site]));
  for (unsigned c = 0; c < c1; ++c) {
    double* gk = g_conv1 + c * k;
    for (unsigned site = 0; site < n; ++site) {
      const double d = dh1[c * n + site];
      for (unsigned t = 0; t < k; ++t) gk[t] += d * s.x[(site + t) % n];
    }
  }
}

void save_convnet(const ConvNetParameters& p, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::uint32_t header[3] = {p.n_sites, p.width, p.ksize};
  bool ok = std::fwrite(header, sizeof(header), 1, f) == 1;
  const auto dump = [&](const std::vector<double>& v) {
    ok = ok && std::fwrite(v.data(), sizeof(double), v.size(), f) == v.size();
  };
  dump(p.conv1);
  dump(p.conv2);
  dump(p.fc);
  std::fclose(f);
  if (!ok) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace nqs
