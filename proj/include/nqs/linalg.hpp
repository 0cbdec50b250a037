#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nqs::linalg {

using cplx = std::complex<double>;

// Solve A x = b for Hermitian positive definite A (row-major, full storage;
// only the upper triangle is read). Returns false if the factorization
// breaks down.
bool solve_hermitian_cholesky(std::size_t n, const std::vector<cplx>& a,
                              const cplx* b, cplx* x);
bool solve_sym_cholesky(std::size_t n, const std::vector<double>& a,
                        const double* b, double* x);

// Pseudo-inverse solve via a full Hermitian eigendecomposition; eigenvalues
// below rcond * max|eig| are dropped.
void solve_hermitian_pinv(std::size_t n, const std::vector<cplx>& a,
                          const cplx* b, cplx* x, double rcond = 1e-12);
void solve_sym_pinv(std::size_t n, const std::vector<double>& a,
                    const double* b, double* x, double rcond = 1e-12);

// Cyclic Jacobi eigensolver for a real symmetric matrix (row-major, full
// storage). Eigenvalues ascending; eigenvectors stored as columns of `evecs`
// when requested.
void jacobi_eigh(std::size_t n, std::vector<double> a,
                 std::vector<double>& evals, std::vector<double>* evecs);

// Hermitian eigendecomposition through the [Re, -Im; Im, Re] real embedding
// (each eigenvalue of A appears twice in the embedding).
void hermitian_eigh(std::size_t n, const std::vector<cplx>& a,
                    std::vector<double>& evals, std::vector<cplx>* evecs);

}  // namespace nqs::linalg
