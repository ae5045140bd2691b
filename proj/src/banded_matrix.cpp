#include "bandflow/banded_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandflow/errors.hpp"

namespace bandflow {

namespace {

std::string index_text(std::size_t n, std::size_t m) {
    return "(" + std::to_string(n) + "," + std::to_string(m) + ")";
}

} // namespace

BandedSymmetricMatrix::BandedSymmetricMatrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), bandwidth_(bandwidth) {
    if (dim == 0) {
        throw InputError("banded matrix: dimension must be positive");
    }
    if (bandwidth >= dim) {
        throw InputError("banded matrix: bandwidth " + std::to_string(bandwidth) +
                         " must be smaller than dimension " + std::to_string(dim));
    }
    values_.assign(band_offset(bandwidth + 1), 0.0);
}

BandedSymmetricMatrix BandedSymmetricMatrix::diagonal(std::span<const double> diag) {
    BandedSymmetricMatrix out(diag.size(), 0);
    for (std::size_t n = 0; n < diag.size(); ++n) {
        out.set(n, n, diag[n]);
    }
    return out;
}

BandedSymmetricMatrix BandedSymmetricMatrix::tridiagonal(std::span<const double> diag,
                                                         std::span<const double> offdiag) {
    if (diag.empty() || offdiag.size() + 1 != diag.size()) {
        throw InputError("tridiagonal: need N diagonal and N-1 off-diagonal entries");
    }
    BandedSymmetricMatrix out(diag.size(), diag.size() > 1 ? 1 : 0);
    for (std::size_t n = 0; n < diag.size(); ++n) {
        out.set(n, n, diag[n]);
    }
    for (std::size_t n = 0; n < offdiag.size(); ++n) {
        out.set(n, n + 1, offdiag[n]);
    }
    return out;
}

std::size_t BandedSymmetricMatrix::band_offset(std::size_t k) const noexcept {
    // sum_{j<k} (dim - j)
    return k * dim_ - k * (k - 1) / 2;
}

double BandedSymmetricMatrix::get(std::size_t n, std::size_t m) const {
    if (n >= dim_ || m >= dim_) {
        throw InputError("index " + index_text(n, m) + " outside a " + std::to_string(dim_) +
                         "x" + std::to_string(dim_) + " matrix");
    }
    const std::size_t lo = std::min(n, m);
    const std::size_t k = std::max(n, m) - lo;
    if (k > bandwidth_) {
        return 0.0;
    }
    return values_[band_offset(k) + lo];
}

void BandedSymmetricMatrix::set(std::size_t n, std::size_t m, double value) {
    if (n >= dim_ || m >= dim_) {
        throw InputError("index " + index_text(n, m) + " outside a " + std::to_string(dim_) +
                         "x" + std::to_string(dim_) + " matrix");
    }
    const std::size_t lo = std::min(n, m);
    const std::size_t k = std::max(n, m) - lo;
    if (k > bandwidth_) {
        throw InputError("entry " + index_text(n, m) + " lies outside bandwidth " +
                         std::to_string(bandwidth_));
    }
    if (!std::isfinite(value)) {
        throw InputError("entry " + index_text(n, m) + " is not finite");
    }
    values_[band_offset(k) + lo] = value;
}

std::span<const double> BandedSymmetricMatrix::band(std::size_t k) const {
    if (k > bandwidth_) {
        throw InputError("band " + std::to_string(k) + " exceeds bandwidth " +
                         std::to_string(bandwidth_));
    }
    return std::span<const double>(values_).subspan(band_offset(k), dim_ - k);
}

std::span<double> BandedSymmetricMatrix::band(std::size_t k) {
    if (k > bandwidth_) {
        throw InputError("band " + std::to_string(k) + " exceeds bandwidth " +
                         std::to_string(bandwidth_));
    }
    return std::span<double>(values_).subspan(band_offset(k), dim_ - k);
}

BandedSymmetricMatrix BandedSymmetricMatrix::widened(std::size_t new_bandwidth) const {
    if (new_bandwidth < bandwidth_) {
        throw InputError("widened: cannot narrow the band");
    }
    BandedSymmetricMatrix out(dim_, new_bandwidth);
    std::copy(values_.begin(), values_.end(), out.values_.begin());
    return out;
}

DenseMatrix BandedSymmetricMatrix::to_dense() const {
    DenseMatrix out(dim_);
    for (std::size_t k = 0; k <= bandwidth_; ++k) {
        const auto b = band(k);
        for (std::size_t n = 0; n < b.size(); ++n) {
            out(n, n + k) = b[n];
            out(n + k, n) = b[n];
        }
    }
    return out;
}

BandedSymmetricMatrix make_banded(std::size_t dim, std::size_t bandwidth,
                                  const std::map<std::pair<std::size_t, std::size_t>, double>& entries) {
    BandedSymmetricMatrix out(dim, bandwidth);
    for (const auto& [index, value] : entries) {
        const auto [n, m] = index;
        if (n != m) {
            const auto mirror = entries.find({m, n});
            if (mirror != entries.end() && mirror->second != value) {
                throw InputError("entries " + index_text(n, m) + " and " + index_text(m, n) +
                                 " disagree");
            }
        }
        out.set(n, m, value);
    }
    return out;
}

BandedSymmetricMatrix from_dense(const DenseMatrix& dense, double symmetry_tol) {
    const std::size_t n = dense.dim();
    if (n == 0) {
        throw InputError("from_dense: empty matrix");
    }
    if (max_asymmetry(dense) > symmetry_tol) {
        throw InputError("from_dense: matrix is not symmetric");
    }
    std::size_t bandwidth = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dense(i, j) != 0.0) {
                bandwidth = std::max(bandwidth, j - i);
            }
        }
    }
    BandedSymmetricMatrix out(n, bandwidth);
    for (std::size_t k = 0; k <= bandwidth; ++k) {
        for (std::size_t i = 0; i + k < n; ++i) {
            out.set(i, i + k, dense(i, i + k));
        }
    }
    return out;
}

double trace(const BandedSymmetricMatrix& h) {
    double sum = 0.0;
    for (double d : h.diagonal()) {
        sum += d;
    }
    return sum;
}

double frobenius_norm_sq(const BandedSymmetricMatrix& h) {
    double diag = 0.0;
    for (double d : h.diagonal()) {
        diag += d * d;
    }
    return diag + offdiag_norm_sq(h);
}

double offdiag_norm_sq(const BandedSymmetricMatrix& h) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= h.bandwidth(); ++k) {
        for (double v : h.band(k)) {
            sum += v * v;
        }
    }
    return 2.0 * sum;
}

double partial_trace(const BandedSymmetricMatrix& h, std::size_t r) {
    if (r < 1 || r > h.dim()) {
        throw InputError("partial_trace: r = " + std::to_string(r) + " outside 1.." +
                         std::to_string(h.dim()));
    }
    double sum = 0.0;
    const auto diag = h.diagonal();
    for (std::size_t n = 0; n < r; ++n) {
        sum += diag[n];
    }
    return sum;
}

std::vector<IrreducibleBlock> split_irreducible(const BandedSymmetricMatrix& h) {
    const std::size_t dim = h.dim();
    const std::size_t bw = h.bandwidth();
    // reach[i]: largest j with h(i,j) != 0 (j >= i). A cut after c is allowed
    // when no row i <= c reaches past c.
    std::vector<IrreducibleBlock> blocks;
    std::size_t start = 0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t k = bw; k >= 1; --k) {
            if (i + k < dim && h.band(k)[i] != 0.0) {
                reach = std::max(reach, i + k);
                break;
            }
        }
        if (reach <= i) {
            blocks.push_back({start, i + 1});
            start = i + 1;
            reach = i + 1;
        }
    }
    return blocks;
}

BandedSymmetricMatrix extract_block(const BandedSymmetricMatrix& h, IrreducibleBlock block) {
    if (block.start >= block.end || block.end > h.dim()) {
        throw InputError("extract_block: invalid block range");
    }
    const std::size_t size = block.size();
    const std::size_t bw = std::min(h.bandwidth(), size - 1);
    BandedSymmetricMatrix out(size, bw);
    for (std::size_t k = 0; k <= bw; ++k) {
        const auto src = h.band(k).subspan(block.start, size - k);
        auto dst = out.band(k);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

void insert_block(BandedSymmetricMatrix& h, const BandedSymmetricMatrix& block_matrix,
                  IrreducibleBlock block) {
    if (block.end > h.dim() || block_matrix.dim() != block.size()) {
        throw InputError("insert_block: block does not fit the parent matrix");
    }
    for (std::size_t k = 0; k <= block_matrix.bandwidth(); ++k) {
        const auto src = block_matrix.band(k);
        if (k > h.bandwidth()) {
            if (std::any_of(src.begin(), src.end(), [](double v) { return v != 0.0; })) {
                throw InputError("insert_block: block has entries outside the parent band");
            }
            continue;
        }
        auto dst = h.band(k).subspan(block.start, src.size());
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

} // namespace bandflow
