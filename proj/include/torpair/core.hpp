#pragma once

// Dense complex matrix kernel: *-operations, norms, spectra and the rank
// predicates every other component relies on.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "torpair/errors.hpp"

namespace torpair {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Tolerance ladder used throughout: relative symmetry check, absolute rank
// threshold (with a 10x gap requirement), relative equality assertions.
inline constexpr double kSymTol = 1e-9;
inline constexpr double kRankTol = 1e-8;
inline constexpr double kEqTol = 1e-10;

inline Matrix adjoint(const Matrix& m) { return m.adjoint(); }

// Largest singular value.
double operator_norm(const Matrix& m);

struct EighResult {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // columns, phase-fixed
};

// Spectral decomposition of a self-adjoint matrix. Eigenvalues ascending;
// each eigenvector's phase is fixed so that its first component of
// significant modulus is real positive. Throws NotSelfAdjoint when
// ||M - M*|| > kSymTol * ||M||.
EighResult eigh(const Matrix& m);

// Number of singular values below tol. The smallest retained singular value
// must clear 10*tol, otherwise the rank decision is refused (GapTooSmall).
int kernel_dimension(const Matrix& m, double tol);

// Singular values, descending (as LAPACK returns them).
std::vector<double> singular_values(const Matrix& m);

// Rank with the same gap discipline as kernel_dimension.
int certified_rank(const Matrix& m, double tol);

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

}  // namespace torpair
