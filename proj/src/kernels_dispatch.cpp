#include "nqs/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace nqs::kernels {

namespace {

struct Table {
  void (*caxpy)(std::size_t, cplx, const cplx*, cplx*);
  void (*raxpy)(std::size_t, double, const cplx*, cplx*);
  void (*daxpy)(std::size_t, double, const double*, double*);
  cplx (*dotc)(std::size_t, const cplx*, const cplx*);
  void (*herk_upper)(std::size_t, std::size_t, const double*, const cplx*,
                     cplx*);
  void (*syrk_upper)(std::size_t, std::size_t, const double*, const double*,
                     double*);
  Isa isa;
};

Table make_table() {
  Table t{scalar::caxpy, scalar::raxpy, scalar::daxpy, scalar::dotc,
          scalar::herk_upper, scalar::syrk_upper, Isa::scalar};
#ifdef NQS_HAVE_X86_KERNELS
  const bool has_avx2 =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  const bool has_avx512 = __builtin_cpu_supports("avx512f");
  const char* force = std::getenv("NQS_SIMD");
  if (force && std::strcmp(force, "scalar") == 0) return t;
  if (has_avx2) {
    t = {avx2::caxpy, avx2::raxpy, avx2::daxpy, avx2::dotc, avx2::herk_upper,
         avx2::syrk_upper, Isa::avx2};
  }
  // AVX-512 is opt-in: measured throughput on the rank-k update is below
  // AVX2 on common parts (frequency licensing, split unaligned loads).
  if (has_avx512 && force && std::strcmp(force, "avx512") == 0) {
    t.caxpy = avx512::caxpy;
    t.raxpy = avx512::raxpy;
    t.herk_upper = avx512::herk_upper;
    t.isa = Isa::avx512;
  }
#endif
  return t;
}

const Table& table() {
  static const Table t = make_table();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
  }
  return "unknown";
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  table().caxpy(n, a, x, y);
}
void raxpy(std::size_t n, double a, const cplx* x, cplx* y) {
  table().raxpy(n, a, x, y);
}
void daxpy(std::size_t n, double a, const double* x, double* y) {
  table().daxpy(n, a, x, y);
}
cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  return table().dotc(n, x, y);
}
void herk_upper(std::size_t n, std::size_t k, const double* w, const cplx* a,
                cplx* s) {
  table().herk_upper(n, k, w, a, s);
}
void syrk_upper(std::size_t n, std::size_t k, const double* w, const double* a,
                double* s) {
  table().syrk_upper(n, k, w, a, s);
}

}  // namespace nqs::kernels
