#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>

#include "nqs/rbm.hpp"
#include "nqs/rng.hpp"

using namespace nqs;

namespace {

RbmParameters random_params(unsigned n, unsigned alpha, double sigma,
                            std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return init_random(n, alpha, sigma, rng);
}

SpinConfiguration random_config(unsigned n, CounterRng& rng) {
  return {static_cast<std::uint32_t>(rng.uniform_int(1u << n)), n};
}

// Direct product formula in extended precision.
std::complex<long double> psi_direct(const RbmParameters& p,
                                     SpinConfiguration x) {
  using cl = std::complex<long double>;
  cl vis(0.0L);
  for (unsigned i = 0; i < p.n_visible; ++i)
    vis += static_cast<long double>(x.spin(i)) *
           cl(p.a[i].real(), p.a[i].imag());
  cl prod = std::exp(vis);
  for (unsigned j = 0; j < p.n_hidden; ++j) {
    cl chi(p.b[j].real(), p.b[j].imag());
    for (unsigned i = 0; i < p.n_visible; ++i)
      chi += static_cast<long double>(x.spin(i)) *
             cl(p.w[i * p.n_hidden + j].real(), p.w[i * p.n_hidden + j].imag());
    prod *= 2.0L * std::cosh(chi);
  }
  return prod;
}

}  // namespace

TEST_CASE("init_random: sizes, sigma=0 degenerate case, sample variance") {
  CounterRng rng(5, 0);
  const auto zero = init_random(8, 3, 0.0, rng);
  CHECK(zero.n_params() == 224);  // 8*24 + 8 + 24
  for (const auto& v : zero.a) CHECK(v == cplx(0.0, 0.0));
  for (const auto& v : zero.w) CHECK(v == cplx(0.0, 0.0));

  const double sigma = 1e-3;
  double sum2 = 0.0;
  std::size_t count = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_params(10, 10, sigma, 1000 + rep);
    for (const auto& v : p.w) {
      sum2 += v.real() * v.real() + v.imag() * v.imag();
      count += 2;
    }
  }
  REQUIRE(count >= 100000);
  const double var = sum2 / count;
  CHECK(std::abs(var - sigma * sigma) < 0.05 * sigma * sigma);
}

TEST_CASE("log_psi of the all-zero RBM is M log 2") {
  const auto p = random_params(8, 3, 0.0, 1);
  CounterRng rng(2, 0);
  for (int t = 0; t < 10; ++t) {
    const cplx lp = log_psi(p, random_config(8, rng));
    CHECK(lp.real() == doctest::Approx(24.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(lp.imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("large activations stay finite (asymptotic branch)") {
  RbmParameters p;
  p.n_visible = 2;
  p.n_hidden = 2;
  p.a = {cplx(0.0), cplx(0.0)};
  p.b = {cplx(500.0, 0.3), cplx(0.0)};
  p.w.assign(4, cplx(0.0));
  const SpinConfiguration x{0b11u, 2};
  const cplx lp = log_psi(p, x);
  CHECK(std::isfinite(lp.real()));
  // log 2cosh(500 + 0.3i) = 500 + 0.3i up to e^-1000; the idle unit adds log 2.
  CHECK(lp.real() == doctest::Approx(500.0 + std::log(2.0)).epsilon(1e-12));
  CHECK(lp.imag() == doctest::Approx(0.3).epsilon(1e-12));

  for (double scale : {1e2, 1e3, 1e4}) {
    p.b[0] = cplx(scale, -2.0);
    CHECK(std::isfinite(log_psi(p, x).real()));
    CHECK(std::isfinite(log2cosh(cplx(-scale, 7.0)).real()));
    CHECK(std::isfinite(tanh_stable(cplx(scale, 1.0)).real()));
  }
}

TEST_CASE("exp(log_psi) matches the extended-precision product formula") {
  const auto p = random_params(6, 2, 0.1, 42);
  CounterRng rng(3, 0);
  for (int t = 0; t < 40; ++t) {
    const SpinConfiguration x = random_config(6, rng);
    const cplx lp = log_psi(p, x);
    const auto direct = psi_direct(p, x);
    const cplx got = std::exp(lp);
    const double scale = static_cast<double>(std::abs(direct));
    CHECK(std::abs(got.real() - static_cast<double>(direct.real())) <=
          1e-12 * scale);
    CHECK(std::abs(got.imag() - static_cast<double>(direct.imag())) <=
          1e-12 * scale);
  }
}

TEST_CASE("log-derivatives: a-block, zero-parameter b-block, finite differences") {
  const auto p0 = random_params(6, 2, 0.0, 7);
  CounterRng rng(4, 0);
  const SpinConfiguration x0 = random_config(6, rng);
  std::vector<cplx> d(p0.n_params());
  log_derivatives(p0, make_lookup(p0, x0), d.data());
  for (unsigned i = 0; i < 6; ++i)
    CHECK(d[i] == cplx(static_cast<double>(x0.spin(i)), 0.0));
  for (unsigned j = 0; j < p0.n_hidden; ++j) CHECK(d[6 + j] == cplx(0.0, 0.0));

  // Central differences of log_psi, holomorphic step in each parameter.
  const double h = 1e-5;
  auto p = random_params(6, 2, 0.1, 99);
  for (int t = 0; t < 5; ++t) {
    const SpinConfiguration x = random_config(6, rng);
    std::vector<cplx> der(p.n_params());
    log_derivatives(p, make_lookup(p, x), der.data());
    auto probe = [&](std::size_t k) -> cplx& {
      if (k < p.a.size()) return p.a[k];
      if (k < p.a.size() + p.b.size()) return p.b[k - p.a.size()];
      return p.w[k - p.a.size() - p.b.size()];
    };
    for (std::size_t k = 0; k < p.n_params(); k += 7) {
      cplx& ref = probe(k);
      const cplx save = ref;
      ref = save + h;
      const cplx up = log_psi(p, x);
      ref = save - h;
      const cplx dn = log_psi(p, x);
      ref = save;
      const cplx fd = (up - dn) / (2.0 * h);
      CHECK(std::abs(fd - der[k]) <= 1e-6 * std::max(1.0, std::abs(der[k])));
    }
  }
}

TEST_CASE("ratio: identity, bias-only, recomputation oracle") {
  const auto p = random_params(8, 2, 0.2, 11);
  CounterRng rng(6, 0);
  const SpinConfiguration x = random_config(8, rng);
  const auto lk = make_lookup(p, x);

  CHECK(ratio(p, lk, {}) == cplx(1.0, 0.0));

  auto bias_only = random_params(8, 2, 0.0, 12);
  CounterRng arng(13, 0);
  for (auto& v : bias_only.a) v = cplx(arng.normal(0.5), arng.normal(0.5));
  const auto blk = make_lookup(bias_only, x);
  for (unsigned i = 0; i < 8; ++i) {
    const unsigned flips[1] = {i};
    const cplx r = ratio(bias_only, blk, flips);
    const cplx expect =
        std::exp(-2.0 * static_cast<double>(x.spin(i)) * bias_only.a[i]);
    CHECK(std::abs(r - expect) <= 1e-12 * std::abs(expect));
  }

  for (int t = 0; t < 30; ++t) {
    unsigned flips[2] = {static_cast<unsigned>(rng.uniform_int(8)),
                         static_cast<unsigned>(rng.uniform_int(8))};
    const unsigned nf = (flips[0] == flips[1]) ? 1u : 2u;
    const cplx r = ratio(p, lk, std::span<const unsigned>(flips, nf));
    SpinConfiguration xp = x;
    for (unsigned f = 0; f < nf; ++f) xp.bits ^= (1u << flips[f]);
    const cplx expect = std::exp(log_psi(p, xp) - log_psi(p, x));
    CHECK(std::abs(r - expect) <= 1e-10 * std::abs(expect));
  }
}

TEST_CASE("quasi-energy: zero point, M log 2 offset, acceptance identity") {
  const auto zero = random_params(6, 2, 0.0, 1);
  CHECK(quasi_energy(zero, SpinConfiguration{0b100u, 6}) == cplx(0.0, 0.0));

  const auto p = random_params(6, 3, 0.3, 21);
  CounterRng rng(9, 0);
  for (int t = 0; t < 20; ++t) {
    const SpinConfiguration x = random_config(6, rng);
    const cplx lp = log_psi(p, x);
    const cplx qe = quasi_energy(p, x);
    CHECK(std::abs(lp - qe - cplx(18.0 * std::log(2.0), 0.0)) <= 1e-12);
  }

  // exp(2 beta Re[E(x') - E(x)]) == |psi(x')/psi(x)|^(2 beta)
  const auto lk = make_lookup(p, SpinConfiguration{0b010101u, 6});
  for (double beta : {0.25, 1.0}) {
    for (unsigned i = 0; i < 6; ++i) {
      const unsigned flips[1] = {i};
      SpinConfiguration xp = lk.bound_config;
      xp.bits ^= (1u << i);
      const double lhs = std::exp(
          2.0 * beta *
          (quasi_energy(p, xp).real() -
           quasi_energy(p, lk.bound_config).real()));
      const double rhs =
          std::pow(std::abs(ratio(p, lk, flips)), 2.0 * beta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("lookup: incremental flips match a fresh rebuild") {
  const auto p = random_params(10, 2, 0.4, 31);
  CounterRng rng(10, 0);
  SpinConfiguration x = random_config(10, rng);
  auto lk = make_lookup(p, x);
  for (int t = 0; t < 257; ++t) {
    const unsigned flips[1] = {static_cast<unsigned>(rng.uniform_int(10))};
    apply_flips(lk, p, flips);
  }
  const auto fresh = make_lookup(p, lk.bound_config);
  for (unsigned j = 0; j < p.n_hidden; ++j)
    CHECK(std::abs(lk.chi[j] - fresh.chi[j]) <=
          1e-10 * std::max(1.0, std::abs(fresh.chi[j])));
}

TEST_CASE("local energy of a diagonal model is the real diagonal element") {
  const auto m = make_model("txyz", {0.0, 0.0, -1.0, -1.0}, 8);
  const auto p = random_params(8, 2, 0.2, 41);
  CounterRng rng(11, 0);
  for (int t = 0; t < 10; ++t) {
    const SpinConfiguration x = random_config(8, rng);
    const cplx e = local_energy(m, p, make_lookup(p, x));
    const auto pairs = connection_pairs(m, x);
    REQUIRE(pairs.size() == 1);
    CHECK(e.real() == doctest::Approx(pairs[0].second).epsilon(1e-12));
    CHECK(e.imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("gauge: b_j += i pi leaves the normalized state unchanged") {
  const auto p = random_params(6, 2, 0.3, 51);
  auto q = p;
  q.b[3] += cplx(0.0, 3.141592653589793238462643);
  // overlap |<p|q>| / (|p| |q|) over the full space.
  std::complex<double> dot(0.0);
  double n1 = 0.0, n2 = 0.0;
  for (std::uint32_t bits = 0; bits < 64; ++bits) {
    const SpinConfiguration x{bits, 6};
    const cplx ap = std::exp(log_psi(p, x));
    const cplx aq = std::exp(log_psi(q, x));
    dot += std::conj(ap) * aq;
    n1 += std::norm(ap);
    n2 += std::norm(aq);
  }
  CHECK(std::abs(dot) / std::sqrt(n1 * n2) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("checkpoint round-trip preserves every parameter bit") {
  const auto p = random_params(7, 3, 0.7, 61);
  const auto path = std::filesystem::temp_directory_path() / "nqs_test.rbm";
  save_rbm(p, path.string());
  const auto q = load_rbm(path.string());
  CHECK(q.n_visible == p.n_visible);
  CHECK(q.n_hidden == p.n_hidden);
  CHECK(q.a == p.a);
  CHECK(q.b == p.b);
  CHECK(q.w == p.w);
  std::filesystem::remove(path);
}
