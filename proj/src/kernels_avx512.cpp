#include "nqs/kernels.hpp"

#ifdef NQS_HAVE_X86_KERNELS

#include <immintrin.h>

#include <vector>

namespace nqs::kernels::avx512 {

namespace {
thread_local std::vector<double> g_alpha;
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m512d var = _mm512_set1_pd(a.real());
  const __m512d vai = _mm512_set1_pd(a.imag());
  std::size_t t = 0;
  for (; t + 8 <= 2 * n; t += 8) {
    const __m512d vx = _mm512_loadu_pd(xd + t);
    const __m512d vxs = _mm512_permute_pd(vx, 0x55);
    const __m512d vy = _mm512_loadu_pd(yd + t);
    const __m512d prod = _mm512_fmaddsub_pd(vx, var, _mm512_mul_pd(vxs, vai));
    _mm512_storeu_pd(yd + t, _mm512_add_pd(vy, prod));
  }
  const double ar = a.real(), ai = a.imag();
  for (; t < 2 * n; t += 2) {
    const double xr = xd[t], xi = xd[t + 1];
    yd[t] += ar * xr - ai * xi;
    yd[t + 1] += ar * xi + ai * xr;
  }
}

void raxpy(std::size_t n, double a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m512d va = _mm512_set1_pd(a);
  std::size_t t = 0;
  for (; t + 8 <= 2 * n; t += 8) {
    const __m512d vy = _mm512_loadu_pd(yd + t);
    _mm512_storeu_pd(yd + t, _mm512_fmadd_pd(va, _mm512_loadu_pd(xd + t), vy));
  }
  for (; t < 2 * n; ++t) yd[t] += a * xd[t];
}

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
    for (; j + 8 <= 2 * n; j += 8) {
      __m512d acc0 = _mm512_loadu_pd(srow0 + j);
      __m512d acc1 = _mm512_loadu_pd(srow1 + j);
      for (std::size_t t = 0; t < k; ++t) {
        const __m512d vx = _mm512_loadu_pd(ad + 2 * t * n + j);
        const __m512d vxs = _mm512_permute_pd(vx, 0x55);
        acc0 = _mm512_add_pd(
            acc0, _mm512_fmaddsub_pd(vx, _mm512_set1_pd(al[4 * t + 0]),
                                     _mm512_mul_pd(vxs, _mm512_set1_pd(
                                                            al[4 * t + 1]))));
        acc1 = _mm512_add_pd(
            acc1, _mm512_fmaddsub_pd(vx, _mm512_set1_pd(al[4 * t + 2]),
                                     _mm512_mul_pd(vxs, _mm512_set1_pd(
                                                            al[4 * t + 3]))));
      }
      _mm512_storeu_pd(srow0 + j, acc0);
      _mm512_storeu_pd(srow1 + j, acc1);
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
  }
  if (i < n) {
    double* srow = sd + 2 * i * n;
    for (std::size_t t = 0; t < k; ++t) {
      const double wt = w[t];
      const double* arow = ad + 2 * t * n;
      caxpy(n - i, cplx(wt * arow[2 * i], -wt * arow[2 * i + 1]),
            reinterpret_cast<const cplx*>(arow + 2 * i),
            reinterpret_cast<cplx*>(srow + 2 * i));
    }
  }
}

}  // namespace nqs::kernels::avx512

#endif  // NQS_HAVE_X86_KERNELS
