#include "nqs/linalg.hpp"

#include "nqs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nqs::linalg {

namespace {

// In-place lower Cholesky factor of the Hermitian matrix stored row-major in
// `m` (upper triangle is the input; lower triangle receives L). Inner
// products run through the SIMD dotc kernel.
bool cholesky_lower(std::size_t n, std::vector<cplx>& m) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = m[j * n + j].real() -
               kernels::dotc(j, m.data() + j * n, m.data() + j * n).real();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    m[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      // A(i,j) = conj(A(j,i)) from the stored upper triangle;
      // dotc(row_j, row_i) = sum_k conj(L[j][k]) L[i][k].
      const cplx s = std::conj(m[j * n + i]) -
                     kernels::dotc(j, m.data() + j * n, m.data() + i * n);
      m[i * n + j] = s / ljj;
    }
  }
  return true;
}

bool cholesky_lower_real(std::size_t n, std::vector<double>& m) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= m[j * n + k] * m[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    m[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m[j * n + i];
      for (std::size_t k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      m[i * n + j] = s / ljj;
    }
  }
  return true;
}

}  // namespace

bool solve_hermitian_cholesky(std::size_t n, const std::vector<cplx>& a,
                              const cplx* b, cplx* x) {
  std::vector<cplx> m(a);
  if (!cholesky_lower(n, m)) return false;
  // L y = b
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= m[i * n + k] * x[k];
    x[i] = s / m[i * n + i].real();
  }
  // L^H x = y
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k)
      s -= std::conj(m[k * n + ii]) * x[k];
    x[ii] = s / m[ii * n + ii].real();
  }
  return true;
}

bool solve_sym_cholesky(std::size_t n, const std::vector<double>& a,
                        const double* b, double* x) {
  std::vector<double> m(a);
  if (!cholesky_lower_real(n, m)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= m[i * n + k] * x[k];
    x[i] = s / m[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= m[k * n + ii] * x[k];
    x[ii] = s / m[ii * n + ii];
  }
  return true;
}

void jacobi_eigh(std::size_t n, std::vector<double> a,
                 std::vector<double>& evals, std::vector<double>* evecs) {
  std::vector<double> v;
  if (evecs) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  // Mirror the upper triangle so both halves stay consistent during sweeps.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[j * n + i] = a[i * n + j];

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag += a[i * n + i] * a[i * n + i];
    if (off <= 1e-30 * std::max(1.0, diag)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        const double scale = std::abs(app) + std::abs(aqq);
        if (scale + 100.0 * std::abs(apq) == scale) {
          a[p * n + q] = a[q * n + p] = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        if (evecs) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k * n + p], vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] < a[j * n + j];
  });
  evals.resize(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a[order[i] * n + order[i]];
  if (evecs) {
    evecs->resize(n * n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r)
        (*evecs)[r * n + c] = v[r * n + order[c]];
  }
}

void hermitian_eigh(std::size_t n, const std::vector<cplx>& a,
                    std::vector<double>& evals, std::vector<cplx>* evecs) {
  const std::size_t m = 2 * n;
  std::vector<double> e(m * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx z = (j >= i) ? a[i * n + j] : std::conj(a[j * n + i]);
      e[i * m + j] = z.real();
      e[i * m + (j + n)] = -z.imag();
      e[(i + n) * m + j] = z.imag();
      e[(i + n) * m + (j + n)] = z.real();
    }
  }
  std::vector<double> all_evals;
  std::vector<double> all_evecs;
  jacobi_eigh(m, std::move(e), all_evals, evecs ? &all_evecs : nullptr);
  // Every eigenvalue is doubled; take one of each pair.
  evals.resize(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = all_evals[2 * i];
  if (evecs) {
    evecs->assign(n * n, cplx(0.0, 0.0));
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t col = 2 * c;
      for (std::size_t r = 0; r < n; ++r)
        (*evecs)[r * n + c] =
            cplx(all_evecs[r * m + col], all_evecs[(r + n) * m + col]);
      // Normalize (the embedded pair shares the 2-norm across both halves).
      double nrm = 0.0;
      for (std::size_t r = 0; r < n; ++r) nrm += std::norm((*evecs)[r * n + c]);
      nrm = std::sqrt(nrm);
      if (nrm > 0.0)
        for (std::size_t r = 0; r < n; ++r) (*evecs)[r * n + c] /= nrm;
    }
  }
}

void solve_hermitian_pinv(std::size_t n, const std::vector<cplx>& a,
                          const cplx* b, cplx* x, double rcond) {
  std::vector<double> evals;
  std::vector<cplx> evecs;
  hermitian_eigh(n, a, evals, &evecs);
  double emax = 0.0;
  for (double e : evals) emax = std::max(emax, std::abs(e));
  const double cutoff = rcond * std::max(emax, 1e-300);
  std::fill(x, x + n, cplx(0.0, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    if (std::abs(evals[c]) <= cutoff) continue;
    cplx proj(0.0, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      proj += std::conj(evecs[r * n + c]) * b[r];
    proj /= evals[c];
    for (std::size_t r = 0; r < n; ++r) x[r] += proj * evecs[r * n + c];
  }
}

void solve_sym_pinv(std::size_t n, const std::vector<double>& a,
                    const double* b, double* x, double rcond) {
  std::vector<double> evals, evecs;
  jacobi_eigh(n, a, evals, &evecs);
  double emax = 0.0;
  for (double e : evals) emax = std::max(emax, std::abs(e));
  const double cutoff = rcond * std::max(emax, 1e-300);
  std::fill(x, x + n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (std::abs(evals[c]) <= cutoff) continue;
    double proj = 0.0;
    for (std::size_t r = 0; r < n; ++r) proj += evecs[r * n + c] * b[r];
    proj /= evals[c];
    for (std::size_t r = 0; r < n; ++r) x[r] += proj * evecs[r * n + c];
  }
}

}  // namespace nqs::linalg
