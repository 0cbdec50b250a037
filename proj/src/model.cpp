#include "nqs/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nqs/errors.hpp"
#include "nqs/parallel.hpp"

namespace nqs {

namespace {

void require_arity(const std::string& name, const std::vector<double>& p,
                   std::size_t want) {
  if (p.size() != want)
    throw std::invalid_argument("model '" + name + "' expects " +
                                std::to_string(want) + " parameters, got " +
                                std::to_string(p.size()));
}

void require_even(const std::string& name, unsigned n) {
  if (n % 2 != 0)
    throw std::invalid_argument("model '" + name +
                                "' applies the even-site sign rule and "
                                "requires even N, got N = " +
                                std::to_string(n));
}

}  // namespace

XyzChainModel make_model(const std::string& name,
                         const std::vector<double>& params, unsigned n_sites) {
  if (n_sites < 2)
    throw std::invalid_argument("model requires N >= 2");
  XyzChainModel m;
  m.n_sites = n_sites;
  m.name = name;
  m.params = params;
  if (name == "xxz") {
    require_arity(name, params, 1);
    m.j1 = 1.0;
    m.j2 = 0.0;
    m.beta1 = {1.0, 1.0, params[0]};
  } else if (name == "xxz-sr") {
    require_arity(name, params, 1);
    require_even(name, n_sites);
    m.j1 = 1.0;
    m.j2 = 0.0;
    m.beta1 = {-1.0, -1.0, params[0]};
  } else if (name == "j1j2") {
    require_arity(name, params, 2);
    m.j1 = params[0];
    m.j2 = params[1];
    m.beta1 = {1.0, 1.0, 1.0};
    m.beta2 = {1.0, 1.0, 1.0};
  } else if (name == "j1j2-sr") {
    require_arity(name, params, 2);
    require_even(name, n_sites);
    m.j1 = params[0];
    m.j2 = params[1];
    m.beta1 = {-1.0, -1.0, 1.0};
    m.beta2 = {1.0, 1.0, 1.0};
  } else if (name == "txyz" || name == "txyz-star" || name == "txyz-diamond") {
    require_arity(name, params, 4);
    const double a = params[0], b = params[1];
    m.j1 = params[2];
    m.j2 = params[3];
    if (name == "txyz") {
      m.beta1 = {a, b, 1.0};
      m.beta2 = {b, a, 1.0};
    } else if (name == "txyz-star") {
      m.beta1 = {1.0, b, a};
      m.beta2 = {1.0, a, b};
    } else {
      m.beta1 = {a, 1.0, b};
      m.beta2 = {b, 1.0, a};
    }
  } else if (name == "custom") {
    require_arity(name, params, 8);
    m.beta1 = {params[0], params[1], params[2]};
    m.beta2 = {params[3], params[4], params[5]};
    m.j1 = params[6];
    m.j2 = params[7];
  } else {
    throw std::invalid_argument("unknown model name '" + name + "'");
  }
  for (double v : params)
    if (!std::isfinite(v))
      throw std::invalid_argument("model parameters must be finite");
  if (m.j2 != 0.0 && n_sites < 4)
    throw std::invalid_argument(
        "next-nearest couplings require N >= 4 (bonds must be distinct)");
  return m;
}

void local_connections(const XyzChainModel& m, SpinConfiguration x,
                       std::vector<Connection>& out) {
  if (x.n_sites != m.n_sites)
    throw std::invalid_argument("configuration size does not match model");
  const unsigned n = m.n_sites;
  out.clear();
  out.push_back({0u, 0.0});
  double diag = 0.0;

  const auto bond = [&](unsigned i, unsigned j, const CouplingMatrix& beta,
                        double scale) {
    const int zz = x.spin(i) * x.spin(j);
    diag += scale * beta.bz * zz;
    const double offd = scale * (beta.bx - beta.by * zz);
    if (offd != 0.0) {
      const std::uint32_t mask = (1u << i) | (1u << j);
      for (auto& c : out) {
        if (c.flip_mask == mask) {
          c.element += offd;
          return;
        }
      }
      out.push_back({mask, offd});
    }
  };

  if (m.j1 != 0.0)
    for (unsigned i = 0; i < n; ++i)
      bond(i, (i + 1) % n, m.beta1, m.j1);
  if (m.j2 != 0.0)
    for (unsigned i = 0; i < n; ++i)
      bond(i, (i + 2) % n, m.beta2, m.j2);
  out[0].element = diag;
}

std::vector<std::pair<SpinConfiguration, double>> connection_pairs(
    const XyzChainModel& m, SpinConfiguration x) {
  std::vector<Connection> conns;
  local_connections(m, x, conns);
  std::vector<std::pair<SpinConfiguration, double>> out;
  out.reserve(conns.size());
  for (const auto& c : conns) out.emplace_back(x.flipped(c.flip_mask), c.element);
  return out;
}

bool is_stoquastic_as_written(const XyzChainModel& m) {
  const auto ok = [](double j, const CouplingMatrix& b) {
    return j * b.bx <= -std::abs(j * b.by);
  };
  return ok(m.j1, m.beta1) && ok(m.j2, m.beta2);
}

void matvec(const XyzChainModel& m, const BasisSector& sector,
            std::span<const double> v, std::span<double> out) {
  if (v.size() != sector.size || out.size() != sector.size)
    throw std::invalid_argument("matvec: vector length != sector size");
  if (sector.n_sites != m.n_sites)
    throw std::invalid_argument("matvec: sector does not match model");
  const std::size_t nblocks = std::max<std::size_t>(1, 4 * max_threads());
  parallel_blocks(nblocks, [&](std::size_t blk) {
    std::vector<Connection> conns;
    const auto [lo, hi] = block_range(sector.size, nblocks, blk);
    for (std::size_t r = lo; r < hi; ++r) {
      const SpinConfiguration x = config_at(r, sector);
      local_connections(m, x, conns);
      double acc = 0.0;
      for (const auto& c : conns) {
        const SpinConfiguration xp = x.flipped(c.flip_mask);
        if (!sector_contains(sector, xp))
          throw SectorError(
              "Hamiltonian connection leaves the sector (model does not "
              "conserve the sector quantum number)");
        acc += c.element * v[sector_index(xp, sector)];
      }
      out[r] = acc;
    }
  });
}

std::vector<double> dense_matrix(const XyzChainModel& m,
                                 const BasisSector& sector) {
  const std::size_t dim = sector.size;
  std::vector<double> h(dim * dim, 0.0);
  std::vector<Connection> conns;
  for (std::size_t c = 0; c < dim; ++c) {
    const SpinConfiguration x = config_at(c, sector);
    local_connections(m, x, conns);
    for (const auto& conn : conns) {
      const SpinConfiguration xp = x.flipped(conn.flip_mask);
      if (!sector_contains(sector, xp))
        throw SectorError("connection leaves the sector");
      h[sector_index(xp, sector) * dim + c] += conn.element;
    }
  }
  return h;
}

}  // namespace nqs
