#include "nqs/kernels.hpp"

#ifdef NQS_HAVE_X86_KERNELS

#include <immintrin.h>

#include <vector>

namespace nqs::kernels::avx2 {

namespace {

// y[0..2n) += (ar + i*ai) * x, interleaved re/im layout.
inline void caxpy_d(std::size_t n2, double ar, double ai, const double* x,
                    double* y) {
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  std::size_t t = 0;
  for (; t + 4 <= n2; t += 4) {
    const __m256d vx = _mm256_loadu_pd(x + t);
    const __m256d vxs = _mm256_permute_pd(vx, 0x5);  // swap re/im pairs
    const __m256d vy = _mm256_loadu_pd(y + t);
    const __m256d prod = _mm256_fmaddsub_pd(vx, var, _mm256_mul_pd(vxs, vai));
    _mm256_storeu_pd(y + t, _mm256_add_pd(vy, prod));
  }
  for (; t < n2; t += 2) {
    const double xr = x[t], xi = x[t + 1];
    y[t] += ar * xr - ai * xi;
    y[t + 1] += ar * xi + ai * xr;
  }
}

thread_local std::vector<double> g_alpha;

}  // namespace

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  caxpy_d(2 * n, a.real(), a.imag(), reinterpret_cast<const double*>(x),
          reinterpret_cast<double*>(y));
}

void raxpy(std::size_t n, double a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d va = _mm256_set1_pd(a);
  std::size_t t = 0;
  for (; t + 4 <= 2 * n; t += 4) {
    const __m256d vy = _mm256_loadu_pd(yd + t);
    _mm256_storeu_pd(yd + t, _mm256_fmadd_pd(va, _mm256_loadu_pd(xd + t), vy));
  }
  for (; t < 2 * n; ++t) yd[t] += a * xd[t];
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d vy = _mm256_loadu_pd(y + t);
    _mm256_storeu_pd(y + t, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + t), vy));
  }
  for (; t < n; ++t) y[t] += a * x[t];
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= 2 * n; t += 4) {
    const __m256d vx = _mm256_loadu_pd(xd + t);
    const __m256d vy = _mm256_loadu_pd(yd + t);
    const __m256d vys = _mm256_permute_pd(vy, 0x5);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);    // xr*yr, xi*yi pairs
    acc_im = _mm256_fmadd_pd(vx, vys, acc_im);   // xr*yi, xi*yr pairs
  }
  alignas(32) double buf_re[4], buf_im[4];
  _mm256_store_pd(buf_re, acc_re);
  _mm256_store_pd(buf_im, acc_im);
  double re = buf_re[0] + buf_re[1] + buf_re[2] + buf_re[3];
  double im = (buf_im[0] - buf_im[1]) + (buf_im[2] - buf_im[3]);
  for (; t < 2 * n; t += 2) {
    const double xr = xd[t], xi = xd[t + 1];
    re += xr * yd[t] + xi * yd[t + 1];
    im += xr * yd[t + 1] - xi * yd[t];
  }
  return {re, im};
}

// Two S rows per pass over the panel tile so each A load feeds four FMAs.
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s) {
  const double* ad = reinterpret_cast<const double*>(a);
  double* sd = reinterpret_cast<double*>(s);
  g_alpha.resize(4 * k);
  double* al = g_alpha.data();

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    for (std::size_t t = 0; t < k; ++t) {
      const double wt = w[t];
      const double* arow = ad + 2 * t * n;
      al[4 * t + 0] = wt * arow[2 * i];
      al[4 * t + 1] = -wt * arow[2 * i + 1];
      al[4 * t + 2] = wt * arow[2 * i + 2];
      al[4 * t + 3] = -wt * arow[2 * i + 3];
    }
    double* srow0 = sd + 2 * i * n;
    double* srow1 = sd + 2 * (i + 1) * n;
    std::size_t j = 2 * i;
    for (; j + 4 <= 2 * n; j += 4) {
      __m256d acc0 = _mm256_loadu_pd(srow0 + j);
      __m256d acc1 = _mm256_loadu_pd(srow1 + j);
      for (std::size_t t = 0; t < k; ++t) {
        const __m256d vx = _mm256_loadu_pd(ad + 2 * t * n + j);
        const __m256d vxs = _mm256_permute_pd(vx, 0x5);
        const __m256d a0r = _mm256_set1_pd(al[4 * t + 0]);
        const __m256d a0i = _mm256_set1_pd(al[4 * t + 1]);
        const __m256d a1r = _mm256_set1_pd(al[4 * t + 2]);
        const __m256d a1i = _mm256_set1_pd(al[4 * t + 3]);
        acc0 = _mm256_add_pd(
            acc0, _mm256_fmaddsub_pd(vx, a0r, _mm256_mul_pd(vxs, a0i)));
        acc1 = _mm256_add_pd(
            acc1, _mm256_fmaddsub_pd(vx, a1r, _mm256_mul_pd(vxs, a1i)));
      }
      _mm256_storeu_pd(srow0 + j, acc0);
      _mm256_storeu_pd(srow1 + j, acc1);
    }
    for (; j < 2 * n; j += 2) {
      double s0r = srow0[j], s0i = srow0[j + 1];
      double s1r = srow1[j], s1i = srow1[j + 1];
      for (std::size_t t = 0; t < k; ++t) {
        const double xr = ad[2 * t * n + j], xi = ad[2 * t * n + j + 1];
        s0r += al[4 * t + 0] * xr - al[4 * t + 1] * xi;
        s0i += al[4 * t + 0] * xi + al[4 * t + 1] * xr;
        s1r += al[4 * t + 2] * xr - al[4 * t + 3] * xi;
        s1i += al[4 * t + 2] * xi + al[4 * t + 3] * xr;
      }
      srow0[j] = s0r;
      srow0[j + 1] = s0i;
      srow1[j] = s1r;
      srow1[j + 1] = s1i;
    }
    // Row i's first column (j == 2*i) touched row i+1's sub-diagonal entry;
    // the loop above started both rows at column i, so row i+1 accumulated
    // S[i+1][i] which belongs to the lower triangle. Clear is not needed:
    // callers only read the upper triangle.
  }
  if (i < n) {
    for (std::size_t t = 0; t < k; ++t) {
      const double wt = w[t];
      const double* arow = ad + 2 * t * n;
      al[2 * t + 0] = wt * arow[2 * i];
      al[2 * t + 1] = -wt * arow[2 * i + 1];
    }
    double* srow = sd + 2 * i * n;
    for (std::size_t t = 0; t < k; ++t)
      caxpy_d(2 * (n - i), al[2 * t], al[2 * t + 1], ad + 2 * t * n + 2 * i,
              srow + 2 * i);
  }
}

void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s) {
  g_alpha.resize(2 * k);
  double* al = g_alpha.data();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    for (std::size_t t = 0; t < k; ++t) {
      al[2 * t + 0] = w[t] * a[t * n + i];
      al[2 * t + 1] = w[t] * a[t * n + i + 1];
    }
    double* srow0 = s + i * n;
    double* srow1 = s + (i + 1) * n;
    std::size_t j = i;
    for (; j + 4 <= n; j += 4) {
      __m256d acc0 = _mm256_loadu_pd(srow0 + j);
      __m256d acc1 = _mm256_loadu_pd(srow1 + j);
      for (std::size_t t = 0; t < k; ++t) {
        const __m256d vx = _mm256_loadu_pd(a + t * n + j);
        acc0 = _mm256_fmadd_pd(_mm256_set1_pd(al[2 * t]), vx, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_set1_pd(al[2 * t + 1]), vx, acc1);
      }
      _mm256_storeu_pd(srow0 + j, acc0);
      _mm256_storeu_pd(srow1 + j, acc1);
    }
    for (; j < n; ++j) {
      double s0 = srow0[j], s1 = srow1[j];
      for (std::size_t t = 0; t < k; ++t) {
        s0 += al[2 * t] * a[t * n + j];
        s1 += al[2 * t + 1] * a[t * n + j];
      }
      srow0[j] = s0;
      srow1[j] = s1;
    }
  }
  if (i < n) {
    double* srow = s + i * n;
    for (std::size_t t = 0; t < k; ++t)
      daxpy(n - i, w[t] * a[t * n + i], a + t * n + i, srow + i);
  }
}

}  // namespace nqs::kernels::avx2

#endif  // NQS_HAVE_X86_KERNELS
