#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bandflow/dense_matrix.hpp"

namespace bandflow {

/// Real symmetric N x N matrix with h(n,m) = 0 whenever |n - m| > M.
///
/// Storage is diagonal-major: band k (0 <= k <= M) holds h(n, n+k) for
/// n = 0..N-1-k, and all bands live back to back in one contiguous array.
/// Only one triangle is stored, so symmetry holds by construction, and any
/// read outside the band returns an exact zero.
class BandedSymmetricMatrix {
public:
    BandedSymmetricMatrix() = default;

    /// Zero matrix. Requires dim >= 1 and bandwidth < dim.
    BandedSymmetricMatrix(std::size_t dim, std::size_t bandwidth);

    static BandedSymmetricMatrix diagonal(std::span<const double> diag);
    static BandedSymmetricMatrix tridiagonal(std::span<const double> diag,
                                             std::span<const double> offdiag);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t bandwidth() const noexcept { return bandwidth_; }

    double get(std::size_t n, std::size_t m) const;

    /// Sets h(n,m) = h(m,n) = value. Rejects entries outside the band and
    /// non-finite values.
    void set(std::size_t n, std::size_t m, double value);

    /// Band k: entries h(n, n+k), length dim - k.
    std::span<const double> band(std::size_t k) const;
    std::span<double> band(std::size_t k);

    std::span<const double> diagonal() const { return band(0); }

    /// The flat storage, band 0 first. Integrators treat this as the state vector.
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Same matrix stored with a wider band (new_bandwidth >= bandwidth()).
    BandedSymmetricMatrix widened(std::size_t new_bandwidth) const;

    DenseMatrix to_dense() const;

    friend bool operator==(const BandedSymmetricMatrix&, const BandedSymmetricMatrix&) = default;

private:
    std::size_t band_offset(std::size_t k) const noexcept;

    std::size_t dim_ = 0;
    std::size_t bandwidth_ = 0;
    std::vector<double> values_;
};

/// Builds a banded matrix from (n,m) -> value entries. Either triangle may be
/// given; giving both (n,m) and (m,n) with different values is rejected.
BandedSymmetricMatrix make_banded(std::size_t dim, std::size_t bandwidth,
                                  const std::map<std::pair<std::size_t, std::size_t>, double>& entries);

/// Dense symmetric -> banded with the smallest bandwidth that holds all nonzeros.
BandedSymmetricMatrix from_dense(const DenseMatrix& dense, double symmetry_tol = 0.0);

double trace(const BandedSymmetricMatrix& h);

/// Sum over all n,m of h(n,m)^2, both symmetric copies counted.
double frobenius_norm_sq(const BandedSymmetricMatrix& h);

/// frobenius_norm_sq without the diagonal.
double offdiag_norm_sq(const BandedSymmetricMatrix& h);

/// Sum of the first r diagonal entries, 1 <= r <= dim.
double partial_trace(const BandedSymmetricMatrix& h, std::size_t r);

/// Half-open index range [start, end).
struct IrreducibleBlock {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const IrreducibleBlock&, const IrreducibleBlock&) = default;
};

/// Cuts between n and n+1 wherever every coupling h(i,j) with i <= n < j is
/// exactly zero. The blocks partition 0..dim.
std::vector<IrreducibleBlock> split_irreducible(const BandedSymmetricMatrix& h);

/// The principal submatrix of a block, keeping the parent's bandwidth where it fits.
BandedSymmetricMatrix extract_block(const BandedSymmetricMatrix& h, IrreducibleBlock block);

/// Writes a block's entries back into the parent. Entries of `block_matrix`
/// beyond the parent's bandwidth must be zero.
void insert_block(BandedSymmetricMatrix& h, const BandedSymmetricMatrix& block_matrix,
                  IrreducibleBlock block);

} // namespace bandflow
