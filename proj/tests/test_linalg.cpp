#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "nqs/linalg.hpp"
#include "nqs/rng.hpp"

using namespace nqs;
using linalg::cplx;

namespace {

// Random Hermitian PSD matrix A = B^H B + shift I.
std::vector<cplx> random_hpd(std::size_t n, double shift, CounterRng& rng) {
  std::vector<cplx> b(n * n), a(n * n, cplx(0.0));
  for (auto& v : b) v = cplx(rng.normal(1.0), rng.normal(1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s(0.0);
      for (std::size_t k = 0; k < n; ++k)
        s += std::conj(b[k * n + i]) * b[k * n + j];
      a[i * n + j] = s;
    }
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += shift;
  return a;
}

}  // namespace

TEST_CASE("cholesky solve reproduces the right-hand side") {
  CounterRng rng(7, 0);
  const std::size_t n = 24;
  const auto a = random_hpd(n, 0.5, rng);
  std::vector<cplx> b(n), x(n);
  for (auto& v : b) v = cplx(rng.normal(1.0), rng.normal(1.0));
  REQUIRE(linalg::solve_hermitian_cholesky(n, a, b.data(), x.data()));
  for (std::size_t i = 0; i < n; ++i) {
    cplx r(0.0);
    for (std::size_t j = 0; j < n; ++j)
      r += (j >= i ? a[i * n + j] : std::conj(a[j * n + i])) * x[j];
    CHECK(std::abs(r - b[i]) <= 1e-9);
  }
}

TEST_CASE("cholesky fails cleanly on an indefinite matrix") {
  std::vector<cplx> a = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(-1.0)};
  std::vector<cplx> b = {cplx(1.0), cplx(1.0)};
  std::vector<cplx> x(2);
  CHECK_FALSE(linalg::solve_hermitian_cholesky(2, a, b.data(), x.data()));
}

TEST_CASE("jacobi eigensolver on a known 3x3") {
  // diag(1, 2, 4) conjugated by a rotation has the same spectrum.
  std::vector<double> a = {2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 4.0};
  std::vector<double> evals, evecs;
  linalg::jacobi_eigh(3, a, evals, &evecs);
  CHECK(evals[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evals[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(evals[2] == doctest::Approx(4.0).epsilon(1e-12));
  // Residual check A v = lambda v for the first eigenpair.
  const std::vector<double> orig = {2.0, 1.0, 0.0, 1.0, 2.0, 0.0,
                                    0.0, 0.0, 4.0};
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 3; ++r) {
      double av = 0.0;
      for (int k = 0; k < 3; ++k) av += orig[r * 3 + k] * evecs[k * 3 + c];
      CHECK(av == doctest::Approx(evals[c] * evecs[r * 3 + c]).epsilon(1e-10));
    }
  }
}

TEST_CASE("hermitian_eigh via real embedding") {
  CounterRng rng(8, 0);
  const std::size_t n = 12;
  const auto a = random_hpd(n, 0.1, rng);
  std::vector<double> evals;
  std::vector<cplx> evecs;
  linalg::hermitian_eigh(n, a, evals, &evecs);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      cplx av(0.0);
      for (std::size_t k = 0; k < n; ++k)
        av += (k >= r ? a[r * n + k] : std::conj(a[k * n + r])) *
              evecs[k * n + c];
      CHECK(std::abs(av - evals[c] * evecs[r * n + c]) <= 1e-8);
    }
  }
  for (std::size_t i = 1; i < n; ++i) CHECK(evals[i - 1] <= evals[i] + 1e-12);
}

TEST_CASE("pseudo-inverse solve handles a singular system") {
  // A = diag(2, 0), b in the range of A.
  std::vector<cplx> a = {cplx(2.0), cplx(0.0), cplx(0.0), cplx(0.0)};
  std::vector<cplx> b = {cplx(3.0), cplx(0.0)};
  std::vector<cplx> x(2);
  linalg::solve_hermitian_pinv(2, a, b.data(), x.data());
  CHECK(std::abs(x[0] - cplx(1.5)) <= 1e-12);
  CHECK(std::abs(x[1]) <= 1e-12);
}
