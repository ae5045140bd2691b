#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bandflow/banded_matrix.hpp"
#include "bandflow/dense_matrix.hpp"

namespace bandflow::oracle {

/// Reference eigenvalues, independent of the flow code.
struct SpectrumResult {
    std::vector<double> eigenvalues;  ///< ascending
    double residual_bound = 0.0;      ///< absolute error bound on each eigenvalue
};

/// Largest dimension accepted by eigenvalues_dense.
inline constexpr std::size_t kDenseMaxDim = 512;

/// Number of eigenvalues strictly below x of the symmetric tridiagonal matrix
/// (diag, offdiag), from the signs of the LDL^T pivots.
std::size_t sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x);

/// All eigenvalues by Sturm-sequence bisection inside the Gershgorin
/// enclosure, each to absolute tolerance 1e-12 ‖H‖.
SpectrumResult eigenvalues_tridiag(std::span<const double> diag, std::span<const double> offdiag);

/// The lowest `count` eigenvalues only.
SpectrumResult eigenvalues_tridiag_lowest(std::span<const double> diag,
                                          std::span<const double> offdiag, std::size_t count);

/// Cyclic Jacobi rotations until the off-diagonal norm is <= 1e-13 ‖H‖.
/// Rejects asymmetric input (beyond 1e-12 relative) and N > kDenseMaxDim.
SpectrumResult eigenvalues_dense(const DenseMatrix& matrix);

/// Bisection for bandwidth <= 1, Jacobi otherwise.
SpectrumResult eigenvalues(const BandedSymmetricMatrix& h);

} // namespace bandflow::oracle
