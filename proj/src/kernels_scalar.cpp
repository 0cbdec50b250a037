#include "nqs/kernels.hpp"

namespace nqs::kernels::scalar {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t t = 0; t < n; ++t) {
    const double xr = xd[2 * t], xi = xd[2 * t + 1];
    yd[2 * t] += ar * xr - ai * xi;
    yd[2 * t + 1] += ar * xi + ai * xr;
  }
}

void raxpy(std::size_t n, double a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t t = 0; t < 2 * n; ++t) yd[t] += a * xd[t];
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t t = 0; t < n; ++t) y[t] += a * x[t];
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double xr = x[t].real(), xi = x[t].imag();
    const double yr = y[t].real(), yi = y[t].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s) {
  for (std::size_t i = 0; i < n; ++i) {
    cplx* srow = s + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      const cplx* arow = a + t * n;
      const cplx alpha = w[t] * std::conj(arow[i]);
      const double cr = alpha.real(), ci = alpha.imag();
      for (std::size_t j = i; j < n; ++j) {
        const double xr = arow[j].real(), xi = arow[j].imag();
        srow[j] += cplx(cr * xr - ci * xi, cr * xi + ci * xr);
      }
    }
  }
}

void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s) {
  for (std::size_t i = 0; i < n; ++i) {
    double* srow = s + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      const double* arow = a + t * n;
      const double c = w[t] * arow[i];
      for (std::size_t j = i; j < n; ++j) srow[j] += c * arow[j];
    }
  }
}

}  // namespace nqs::kernels::scalar
