#include "nqs/ed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "nqs/errors.hpp"
#include "nqs/linalg.hpp"
#include "nqs/parallel.hpp"
#include "nqs/rng.hpp"

namespace nqs {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void orient_max_positive(std::vector<double>& v) {
  std::size_t imax = 0;
  double amax = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > amax) {
      amax = a;
      imax = i;
    }
  }
  if (v[imax] < 0.0)
    for (auto& x : v) x = -x;
}

}  // namespace

LinearOp sector_op(const XyzChainModel& model, const BasisSector& sector) {
  // Materialize the configurations once; target indices are recomputed per
  // apply (O(N) combinatorial rank, cheap next to the element arithmetic).
  auto configs = std::make_shared<std::vector<SpinConfiguration>>(
      enumerate_sector(sector.n_sites, sector.kind));
  LinearOp op;
  op.dim = sector.size;
  op.apply = [model, sector, configs](std::span<const double> v,
                                      std::span<double> out) {
    const std::size_t nblocks = std::max<std::size_t>(1, 4 * max_threads());
    parallel_blocks(nblocks, [&](std::size_t blk) {
      std::vector<Connection> conns;
      const auto [lo, hi] = block_range(configs->size(), nblocks, blk);
      for (std::size_t r = lo; r < hi; ++r) {
        const SpinConfiguration x = (*configs)[r];
        local_connections(model, x, conns);
        double acc = 0.0;
        for (const auto& c : conns) {
          const SpinConfiguration xp = x.flipped(c.flip_mask);
          if (!sector_contains(sector, xp))
            throw SectorError("connection leaves the sector");
          acc += c.element * v[sector_index(xp, sector)];
        }
        out[r] = acc;
      }
    });
  };
  return op;
}

LinearOp parity_op(const XyzChainModel& model, int parity) {
  if (parity != 1 && parity != -1)
    throw std::invalid_argument("parity must be +1 or -1");
  const unsigned n = model.n_sites;
  const std::uint32_t mask = (n == 32) ? 0xFFFFFFFFu : ((1u << n) - 1u);
  const std::uint32_t top = 1u << (n - 1);
  LinearOp op;
  op.dim = std::uint64_t{1} << (n - 1);
  const double p = static_cast<double>(parity);
  op.apply = [model, mask, top, p, n](std::span<const double> v,
                                      std::span<double> out) {
    const std::size_t nblocks = std::max<std::size_t>(1, 4 * max_threads());
    const std::uint64_t dim = std::uint64_t{1} << (n - 1);
    parallel_blocks(nblocks, [&](std::size_t blk) {
      std::vector<Connection> conns;
      const auto [lo, hi] = block_range(dim, nblocks, blk);
      for (std::size_t r = lo; r < hi; ++r) {
        const SpinConfiguration x{static_cast<std::uint32_t>(r), n};
        local_connections(model, x, conns);
        double acc = 0.0;
        for (const auto& c : conns) {
          const std::uint32_t xp = x.bits ^ c.flip_mask;
          // Representative has the top site down; the flipped partner picks
          // up the parity sign.
          if (xp & top)
            acc += p * c.element * v[(~xp) & mask];
          else
            acc += c.element * v[xp];
        }
        out[r] = acc;
      }
    });
  };
  return op;
}

// Thick-restart Lanczos with full reorthogonalization. Bookkeeping: after
// the projection step for basis size k, column k-1 of the k x k projected
// matrix T holds all Gram-Schmidt coefficients of A v_{k-1}; for plain chain
// steps these are the usual (alpha, beta) entries and after a restart they
// reproduce the arrow couplings, so one rule covers both.
LowestResult lanczos_lowest(const LinearOp& op, double tol, std::uint64_t seed,
                            unsigned max_iter, unsigned basis_cap) {
  const std::size_t dim = op.dim;
  if (dim == 0) throw std::invalid_argument("empty operator");
  if (basis_cap == 0) basis_cap = dim > 300000 ? 48 : 80;
  const unsigned m_max = static_cast<unsigned>(
      std::max<std::uint64_t>(3, std::min<std::uint64_t>(basis_cap, dim)));
  const unsigned n_keep = std::min<unsigned>(8, m_max - 2);
  const std::size_t stride = m_max + 1;

  CounterRng rng(seed, 0x1a2cull);
  std::vector<std::vector<double>> basis;
  std::vector<double> t(stride * stride, 0.0);
  std::vector<double> w(dim), r(dim);

  for (auto& x : r) x = rng.normal(1.0);
  const double r0 = norm2(r);
  for (auto& x : r) x /= r0;
  basis.push_back(std::move(r));

  unsigned iterations = 0;
  double residual = 0.0, value = 0.0;
  std::vector<double> ground, theta, z;

  while (true) {
    const std::size_t k = basis.size();
    op.apply(basis[k - 1], w);
    ++iterations;
    std::vector<double> h(k, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        const double c = dot(basis[i], w);
        h[i] += c;
        axpy(-c, basis[i], w);
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      t[i * stride + (k - 1)] = h[i];
      t[(k - 1) * stride + i] = h[i];
    }
    const double b = norm2(w);

    std::vector<double> tk(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) tk[i * k + j] = t[i * stride + j];
    linalg::jacobi_eigh(k, tk, theta, &z);
    value = theta[0];
    residual = std::abs(b * z[(k - 1) * k + 0]);
    const double scale = std::max(1.0, std::abs(value));

    if (residual <= tol * scale || k >= dim || iterations >= max_iter) {
      ground.assign(dim, 0.0);
      for (std::size_t i = 0; i < k; ++i) axpy(z[i * k + 0], basis[i], ground);
      break;
    }

    for (auto& x : w) x /= b;
    if (k < m_max) {
      t[k * stride + (k - 1)] = b;
      t[(k - 1) * stride + k] = b;
      basis.push_back(w);
      continue;
    }

    // Restart: lowest n_keep Ritz vectors plus the fresh residual direction.
    std::vector<std::vector<double>> kept(n_keep,
                                          std::vector<double>(dim, 0.0));
    for (unsigned c = 0; c < n_keep; ++c)
      for (std::size_t i = 0; i < k; ++i)
        axpy(z[i * k + c], basis[i], kept[c]);
    std::fill(t.begin(), t.end(), 0.0);
    for (unsigned c = 0; c < n_keep; ++c) {
      t[c * stride + c] = theta[c];
      t[c * stride + n_keep] = b * z[(k - 1) * k + c];
      t[n_keep * stride + c] = t[c * stride + n_keep];
    }
    basis.clear();
    for (auto& v : kept) basis.push_back(std::move(v));
    basis.push_back(w);
  }

  const double nrm = norm2(ground);
  if (nrm > 0.0)
    for (auto& x : ground) x /= nrm;
  LowestResult res;
  res.value = value;
  res.vector = std::move(ground);
  res.iterations = iterations;
  res.residual = residual;
  return res;
}

std::vector<double> lanczos_full_spectrum(const LinearOp& op,
                                          std::uint64_t seed) {
  const std::size_t dim = op.dim;
  if (dim > 4096)
    throw std::invalid_argument("full spectrum only for small operators");
  CounterRng rng(seed, 0xf111ull);
  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim);
  std::vector<double> r(dim);
  for (auto& x : r) x = rng.normal(1.0);
  double b = norm2(r);
  for (auto& x : r) x /= b;
  basis.push_back(r);
  std::vector<double> t(dim * dim, 0.0);

  for (std::size_t k = 1; k <= dim; ++k) {
    op.apply(basis[k - 1], w);
    std::vector<double> h(k, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        const double c = dot(basis[i], w);
        h[i] += c;
        axpy(-c, basis[i], w);
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      t[i * dim + (k - 1)] = h[i];
      t[(k - 1) * dim + i] = h[i];
    }
    if (k == dim) break;
    b = norm2(w);
    if (b < 1e-12) {
      for (auto& x : w) x = rng.normal(1.0);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : basis) axpy(-dot(v, w), v, w);
      b = norm2(w);
      t[k * dim + (k - 1)] = 0.0;
      t[(k - 1) * dim + k] = 0.0;
    } else {
      t[k * dim + (k - 1)] = b;
      t[(k - 1) * dim + k] = b;
    }
    for (auto& x : w) x /= b;
    basis.push_back(w);
  }

  std::vector<double> evals;
  linalg::jacobi_eigh(dim, t, evals, nullptr);
  return evals;
}

EdResult lanczos_ground(const XyzChainModel& model, const BasisSector& sector,
                        double tol, std::uint64_t seed, unsigned max_iter) {
  const LinearOp op = sector_op(model, sector);
  LowestResult low = lanczos_lowest(op, tol, seed, max_iter);
  if (low.residual > tol * std::max(1.0, std::abs(low.value)))
    throw std::runtime_error("Lanczos did not converge within max iterations");
  orient_max_positive(low.vector);
  EdResult r;
  r.energy = low.value;
  r.vector = std::move(low.vector);
  r.sector = sector;
  r.n_iterations = low.iterations;
  r.residual = low.residual;
  return r;
}

std::pair<double, double> z2_resolved_energies(const XyzChainModel& model,
                                               double tol,
                                               std::uint64_t seed) {
  const LinearOp sym = parity_op(model, +1);
  const LinearOp anti = parity_op(model, -1);
  const LowestResult ls = lanczos_lowest(sym, tol, seed, 2000);
  const LowestResult la = lanczos_lowest(anti, tol, seed, 2000);
  return {ls.value, la.value};
}

std::vector<double> full_amplitudes(const EdResult& r) {
  const std::size_t full = std::size_t{1} << r.sector.n_sites;
  std::vector<double> out(full, 0.0);
  for (std::uint64_t idx = 0; idx < r.sector.size; ++idx)
    out[config_at(idx, r.sector).bits] = r.vector[idx];
  return out;
}

double entanglement_entropy(const EdResult& r, unsigned cut) {
  const unsigned n = r.sector.n_sites;
  if (cut < 1 || cut >= n) throw std::invalid_argument("cut out of range");
  const std::vector<double> psi = full_amplitudes(r);
  const unsigned small_cut = std::min(cut, n - cut);
  const bool left_small = cut <= n - cut;
  const std::size_t ds = std::size_t{1} << small_cut;
  const std::size_t dl = std::size_t{1} << (n - small_cut);
  // rho on the smaller side: rho[a][b] = sum_e A[a][e] A[b][e].
  std::vector<double> rho(ds * ds, 0.0);
  const std::uint32_t lmask = (1u << cut) - 1u;
  for (std::size_t e = 0; e < dl; ++e) {
    for (std::size_t a = 0; a < ds; ++a) {
      const std::uint32_t bits =
          left_small ? (static_cast<std::uint32_t>(a) |
                        (static_cast<std::uint32_t>(e) << cut))
                     : ((static_cast<std::uint32_t>(e) & lmask) |
                        (static_cast<std::uint32_t>(a) << cut));
      const double va = psi[bits];
      if (va == 0.0) continue;
      for (std::size_t b = a; b < ds; ++b) {
        const std::uint32_t bitsb =
            left_small ? (static_cast<std::uint32_t>(b) |
                          (static_cast<std::uint32_t>(e) << cut))
                       : ((static_cast<std::uint32_t>(e) & lmask) |
                          (static_cast<std::uint32_t>(b) << cut));
        rho[a * ds + b] += va * psi[bitsb];
      }
    }
  }
  std::vector<double> evals;
  linalg::jacobi_eigh(ds, rho, evals, nullptr);
  double s = 0.0;
  for (double p : evals)
    if (p > 1e-14) s -= p * std::log(p);
  return s;
}

double susceptibility(const EdResult& r, char axis) {
  const unsigned n = r.sector.n_sites;
  if (axis == 'z') {
    double m1 = 0.0, m2 = 0.0;
    for (std::uint64_t idx = 0; idx < r.sector.size; ++idx) {
      const double p = r.vector[idx] * r.vector[idx];
      const int mag =
          2 * std::popcount(config_at(idx, r.sector).bits) - static_cast<int>(n);
      m1 += p * mag;
      m2 += p * static_cast<double>(mag) * mag;
    }
    return (m2 - m1 * m1) / n;
  }
  if (axis != 'x' && axis != 'y') throw std::invalid_argument("axis");
  const std::vector<double> psi = full_amplitudes(r);
  const std::size_t full = psi.size();
  double j1 = 0.0;  // <J_alpha>; identically zero for y on a real state
  if (axis == 'x') {
    for (std::size_t x = 0; x < full; ++x) {
      if (psi[x] == 0.0) continue;
      for (unsigned i = 0; i < n; ++i) j1 += psi[x ^ (1u << i)] * psi[x];
    }
  }
  double j2 = static_cast<double>(n);  // i == j terms: sigma^2 = 1
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::uint32_t mask = (1u << i) | (1u << j);
      double term = 0.0;
      if (axis == 'x') {
        for (std::size_t x = 0; x < full; ++x)
          if (psi[x] != 0.0) term += psi[x ^ mask] * psi[x];
      } else {
        for (std::size_t x = 0; x < full; ++x) {
          if (psi[x] == 0.0) continue;
          const SpinConfiguration c{static_cast<std::uint32_t>(x), n};
          term -= c.spin(i) * c.spin(j) * psi[x ^ mask] * psi[x];
        }
      }
      j2 += term;
    }
  }
  return (j2 - j1 * j1) / n;
}

double correlation(const EdResult& r, char axis, unsigned k) {
  const unsigned n = r.sector.n_sites;
  if (k > n / 2) throw std::invalid_argument("k out of range");
  if (k == 0) return 1.0;
  const std::vector<double> psi = full_amplitudes(r);
  const std::size_t full = psi.size();
  double acc = 0.0;
  for (unsigned i = 0; i < n; ++i) {
    const unsigned j = (i + k) % n;
    const std::uint32_t mask = (1u << i) | (1u << j);
    for (std::size_t x = 0; x < full; ++x) {
      if (psi[x] == 0.0) continue;
      const SpinConfiguration c{static_cast<std::uint32_t>(x), n};
      switch (axis) {
        case 'x':
          acc += psi[x ^ mask] * psi[x];
          break;
        case 'y':
          acc -= c.spin(i) * c.spin(j) * psi[x ^ mask] * psi[x];
          break;
        case 'z':
          acc += c.spin(i) * c.spin(j) * psi[x] * psi[x];
          break;
        default:
          throw std::invalid_argument("axis");
      }
    }
  }
  return acc / n;
}

double top_k_mass(const EdResult& r, std::size_t k) {
  if (k > r.vector.size()) throw std::invalid_argument("k > sector size");
  std::vector<double> p(r.vector.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = r.vector[i] * r.vector[i];
  std::partial_sort(p.begin(), p.begin() + k, p.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += p[i];
  return s;
}

double energy_second_derivative(
    const std::function<XyzChainModel(double)>& family, double theta, double h,
    SectorKind kind, double tol) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  const auto energy = [&](double t) {
    const XyzChainModel m = family(t);
    const BasisSector sector = make_sector(kind, m.n_sites);
    return lanczos_ground(m, sector, tol).energy;
  };
  const double ep = energy(theta + h);
  const double e0 = energy(theta);
  const double em = energy(theta - h);
  return (ep - 2.0 * e0 + em) / (h * h);
}

}  // namespace nqs
