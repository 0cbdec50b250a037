#include "nqs/rbm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nqs/kernels.hpp"

namespace nqs {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLog2 = 0.69314718055994530941723212145818;

thread_local std::vector<cplx> g_chi_scratch;
}  // namespace

void RbmParameters::apply_update(std::span<const cplx> delta, double eta) {
  if (delta.size() != n_params())
    throw std::invalid_argument("update length != parameter count");
  std::size_t k = 0;
  for (auto& v : a) v -= eta * delta[k++];
  for (auto& v : b) v -= eta * delta[k++];
  for (auto& v : w) v -= eta * delta[k++];
}

RbmParameters init_random(unsigned n_visible, unsigned alpha, double sigma,
                          CounterRng& rng) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  RbmParameters p;
  p.n_visible = n_visible;
  p.n_hidden = alpha * n_visible;
  const auto draw = [&] { return cplx(rng.normal(sigma), rng.normal(sigma)); };
  p.a.resize(n_visible);
  p.b.resize(p.n_hidden);
  p.w.resize(std::size_t{n_visible} * p.n_hidden);
  for (auto& v : p.a) v = draw();
  for (auto& v : p.b) v = draw();
  for (auto& v : p.w) v = draw();
  return p;
}

ActivationLookup make_lookup(const RbmParameters& p, SpinConfiguration x) {
  ActivationLookup lk;
  refresh_lookup(lk, p, x);
  return lk;
}

void refresh_lookup(ActivationLookup& lk, const RbmParameters& p,
                    SpinConfiguration x) {
  if (x.n_sites != p.n_visible)
    throw std::invalid_argument("configuration size != n_visible");
  const unsigned m = p.n_hidden;
  lk.chi.assign(p.b.begin(), p.b.end());
  for (unsigned i = 0; i < p.n_visible; ++i)
    kernels::raxpy(m, static_cast<double>(x.spin(i)), p.w.data() + i * m,
                   lk.chi.data());
  lk.bound_config = x;
}

void apply_flips(ActivationLookup& lk, const RbmParameters& p,
                 std::span<const unsigned> flips) {
  const unsigned m = p.n_hidden;
  for (unsigned i : flips) {
    kernels::raxpy(m, -2.0 * lk.bound_config.spin(i), p.w.data() + i * m,
                   lk.chi.data());
    lk.bound_config.bits ^= (1u << i);
  }
}

cplx log2cosh(cplx z) {
  if (z.real() < 0.0) z = -z;
  const cplx r = z + std::log(1.0 + std::exp(-2.0 * z));
  return {r.real(), std::remainder(r.imag(), 2.0 * kPi)};
}

double re_log2cosh(cplx z) {
  if (z.real() < 0.0) z = -z;
  const cplx e = std::exp(-2.0 * z);
  return z.real() + 0.5 * std::log(std::norm(1.0 + e));
}

cplx tanh_stable(cplx z) {
  const double s = z.real() < 0.0 ? -1.0 : 1.0;
  if (z.real() < 0.0) z = -z;
  const cplx e = std::exp(-2.0 * z);
  return s * (1.0 - e) / (1.0 + e);
}

cplx log_psi(const RbmParameters& p, SpinConfiguration x) {
  if (x.n_sites != p.n_visible)
    throw std::invalid_argument("configuration size != n_visible");
  cplx acc(0.0, 0.0);
  for (unsigned i = 0; i < p.n_visible; ++i)
    acc += static_cast<double>(x.spin(i)) * p.a[i];
  std::vector<cplx>& chi = g_chi_scratch;
  chi.assign(p.b.begin(), p.b.end());
  for (unsigned i = 0; i < p.n_visible; ++i)
    kernels::raxpy(p.n_hidden, static_cast<double>(x.spin(i)),
                   p.w.data() + i * p.n_hidden, chi.data());
  for (unsigned j = 0; j < p.n_hidden; ++j) acc += log2cosh(chi[j]);
  return acc;
}

cplx quasi_energy(const RbmParameters& p, SpinConfiguration x) {
  return log_psi(p, x) - cplx(p.n_hidden * kLog2, 0.0);
}

void log_derivatives(const RbmParameters& p, const ActivationLookup& lk,
                     cplx* out) {
  const unsigned n = p.n_visible, m = p.n_hidden;
  const SpinConfiguration x = lk.bound_config;
  for (unsigned i = 0; i < n; ++i)
    out[i] = cplx(static_cast<double>(x.spin(i)), 0.0);
  cplx* tb = out + n;
  for (unsigned j = 0; j < m; ++j) tb[j] = tanh_stable(lk.chi[j]);
  cplx* tw = out + n + m;
  for (unsigned i = 0; i < n; ++i) {
    const double xi = static_cast<double>(x.spin(i));
    for (unsigned j = 0; j < m; ++j) tw[i * m + j] = xi * tb[j];
  }
}

cplx log_ratio(const RbmParameters& p, const ActivationLookup& lk,
               std::span<const unsigned> flips) {
  const unsigned m = p.n_hidden;
  cplx acc(0.0, 0.0);
  std::vector<cplx>& chi = g_chi_scratch;
  chi.assign(lk.chi.begin(), lk.chi.end());
  for (unsigned i : flips) {
    acc += -2.0 * static_cast<double>(lk.bound_config.spin(i)) * p.a[i];
    kernels::raxpy(m, -2.0 * lk.bound_config.spin(i), p.w.data() + i * m,
                   chi.data());
  }
  for (unsigned j = 0; j < m; ++j)
    acc += log2cosh(chi[j]) - log2cosh(lk.chi[j]);
  return acc;
}

cplx ratio(const RbmParameters& p, const ActivationLookup& lk,
           std::span<const unsigned> flips) {
  if (flips.empty()) return cplx(1.0, 0.0);
  return std::exp(log_ratio(p, lk, flips));
}

double log_ratio_re(const RbmParameters& p, const ActivationLookup& lk,
                    std::span<const unsigned> flips) {
  const unsigned m = p.n_hidden;
  double acc = 0.0;
  std::vector<cplx>& chi = g_chi_scratch;
  chi.assign(lk.chi.begin(), lk.chi.end());
  for (unsigned i : flips) {
    acc += -2.0 * static_cast<double>(lk.bound_config.spin(i)) * p.a[i].real();
    kernels::raxpy(m, -2.0 * lk.bound_config.spin(i), p.w.data() + i * m,
                   chi.data());
  }
  for (unsigned j = 0; j < m; ++j)
    acc += re_log2cosh(chi[j]) - re_log2cosh(lk.chi[j]);
  return acc;
}

cplx local_energy(const XyzChainModel& model, const RbmParameters& p,
                  const ActivationLookup& lk) {
  thread_local std::vector<Connection> conns;
  thread_local std::vector<cplx> chi;
  local_connections(model, lk.bound_config, conns);
  const unsigned m = p.n_hidden;
  cplx base(0.0, 0.0);
  for (unsigned j = 0; j < m; ++j) base += log2cosh(lk.chi[j]);

  cplx acc(0.0, 0.0);
  for (const auto& c : conns) {
    if (c.flip_mask == 0) {
      acc += c.element;
      continue;
    }
    chi.assign(lk.chi.begin(), lk.chi.end());
    cplx lr = -base;
    std::uint32_t mask = c.flip_mask;
    while (mask) {
      const unsigned i = static_cast<unsigned>(__builtin_ctz(mask));
      mask &= mask - 1;
      const double xi = static_cast<double>(lk.bound_config.spin(i));
      lr += -2.0 * xi * p.a[i];
      kernels::raxpy(m, -2.0 * xi, p.w.data() + i * m, chi.data());
    }
    for (unsigned j = 0; j < m; ++j) lr += log2cosh(chi[j]);
    acc += c.element * std::exp(lr);
  }
  return acc;
}

void save_rbm(const RbmParameters& p, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::uint32_t header[2] = {p.n_visible, p.n_hidden};
  bool ok = std::fwrite(header, sizeof(header), 1, f) == 1;
  ok = ok && std::fwrite(p.a.data(), sizeof(cplx), p.a.size(), f) == p.a.size();
  ok = ok && std::fwrite(p.b.data(), sizeof(cplx), p.b.size(), f) == p.b.size();
  ok = ok && std::fwrite(p.w.data(), sizeof(cplx), p.w.size(), f) == p.w.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("short write to '" + path + "'");
}

RbmParameters load_rbm(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::uint32_t header[2];
  if (std::fread(header, sizeof(header), 1, f) != 1) {
    std::fclose(f);
    throw std::runtime_error("truncated checkpoint '" + path + "'");
  }
  RbmParameters p;
  p.n_visible = header[0];
  p.n_hidden = header[1];
  p.a.resize(p.n_visible);
  p.b.resize(p.n_hidden);
  p.w.resize(std::size_t{p.n_visible} * p.n_hidden);
  bool ok = std::fread(p.a.data(), sizeof(cplx), p.a.size(), f) == p.a.size();
  ok = ok && std::fread(p.b.data(), sizeof(cplx), p.b.size(), f) == p.b.size();
  ok = ok && std::fread(p.w.data(), sizeof(cplx), p.w.size(), f) == p.w.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("truncated checkpoint '" + path + "'");
  return p;
}

}  // namespace nqs
