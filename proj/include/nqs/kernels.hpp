#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Data-parallel inner loops used by the estimators and the wavefunction
// updates. Every kernel has a scalar reference implementation and SIMD
// variants (AVX2, AVX-512) selected once at startup from CPUID, overridable
// with NQS_SIMD=scalar|avx2|avx512. SIMD variants are equivalence-tested
// against the scalar reference.
namespace nqs::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, avx512 };

// Instruction set the dispatch table resolved to.
Isa active_isa();
std::string isa_name(Isa isa);

// y[t] += a * x[t]
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void raxpy(std::size_t n, double a, const cplx* x, cplx* y);
void daxpy(std::size_t n, double a, const double* x, double* y);

// sum_t conj(x[t]) * y[t]
cplx dotc(std::size_t n, const cplx* x, const cplx* y);

// Weighted Hermitian rank-k accumulation, upper triangle only:
//   S[i*n + j] += sum_{s<k} w[s] * conj(A[s*n + i]) * A[s*n + j],  j >= i.
// A is a row-major panel of k sample vectors. The hot loop of SR/ER.
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s);

// Real symmetric counterpart (classical Fisher matrix accumulation).
void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s);

// Per-ISA entry points, used directly by the equivalence tests.
namespace scalar {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void raxpy(std::size_t n, double a, const cplx* x, cplx* y);
void daxpy(std::size_t n, double a, const double* x, double* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s);
void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define NQS_HAVE_X86_KERNELS 1
namespace avx2 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void raxpy(std::size_t n, double a, const cplx* x, cplx* y);
void daxpy(std::size_t n, double a, const double* x, double* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s);
void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s);
}  // namespace avx2

namespace avx512 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void raxpy(std::size_t n, double a, const cplx* x, cplx* y);
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s);
}  // namespace avx512
#endif

}  // namespace nqs::kernels
