#include "bandflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandflow/errors.hpp"

namespace bandflow::oracle {

namespace {

void check_tridiag(std::span<const double> diag, std::span<const double> offdiag) {
    if (diag.empty() || offdiag.size() + 1 != diag.size()) {
        throw InputError("tridiagonal oracle: need N diagonal and N-1 off-diagonal entries");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(diag.begin(), diag.end(), finite) ||
        !std::all_of(offdiag.begin(), offdiag.end(), finite)) {
        throw InputError("tridiagonal oracle: non-finite input");
    }
}

struct Enclosure {
    double lo;
    double hi;
    double norm;  // max |Gershgorin endpoint|
};

Enclosure gershgorin(std::span<const double> diag, std::span<const double> offdiag) {
    Enclosure enc{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(offdiag[i - 1]);
        if (i + 1 < diag.size()) radius += std::abs(offdiag[i]);
        enc.lo = std::min(enc.lo, diag[i] - radius);
        enc.hi = std::max(enc.hi, diag[i] + radius);
    }
    enc.norm = std::max(std::abs(enc.lo), std::abs(enc.hi));
    return enc;
}

double pivot_floor(std::span<const double> offdiag) {
    double max_e2 = 1.0;
    for (double e : offdiag) {
        max_e2 = std::max(max_e2, e * e);
    }
    return std::numeric_limits<double>::min() * max_e2 / std::numeric_limits<double>::epsilon();
}

std::size_t sturm_count_impl(std::span<const double> diag, std::span<const double> offdiag, double x,
                             double pivmin) {
    std::size_t count = 0;
    double q = diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

SpectrumResult bisect(std::span<const double> diag, std::span<const double> offdiag, std::size_t count) {
    check_tridiag(diag, offdiag);
    const Enclosure enc = gershgorin(diag, offdiag);
    const double pivmin = pivot_floor(offdiag);
    const double tol = std::max(1e-12 * enc.norm, 4.0 * std::numeric_limits<double>::min());

    SpectrumResult result;
    result.residual_bound = tol;
    result.eigenvalues.resize(count);
    // Widen slightly so the endpoints strictly bracket the spectrum.
    const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(enc.norm, 1.0) + tol;
    const double lo0 = enc.lo - pad;
    const double hi0 = enc.hi + pad;

    double lo = lo0;
    for (std::size_t k = 0; k < count; ++k) {
        // Invariant: sturm_count(lo) <= k < sturm_count(hi).
        double hi = hi0;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            if (sturm_count_impl(diag, offdiag, mid, pivmin) > k) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        result.eigenvalues[k] = 0.5 * (lo + hi);
        // The next eigenvalue is >= this one: keep lo as its lower bracket.
    }
    return result;
}

} // namespace

std::size_t sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x) {
    check_tridiag(diag, offdiag);
    return sturm_count_impl(diag, offdiag, x, pivot_floor(offdiag));
}

SpectrumResult eigenvalues_tridiag(std::span<const double> diag, std::span<const double> offdiag) {
    return bisect(diag, offdiag, diag.size());
}

SpectrumResult eigenvalues_tridiag_lowest(std::span<const double> diag,
                                          std::span<const double> offdiag, std::size_t count) {
    if (count > diag.size()) {
        throw InputError("eigenvalues_tridiag_lowest: count exceeds dimension");
    }
    return bisect(diag, offdiag, count);
}

SpectrumResult eigenvalues_dense(const DenseMatrix& matrix) {
    const std::size_t n = matrix.dim();
    if (n == 0) {
        throw InputError("dense oracle: empty matrix");
    }
    if (n > kDenseMaxDim) {
        throw InputError("dense oracle: dimension " + std::to_string(n) + " exceeds " +
                         std::to_string(kDenseMaxDim));
    }
    double max_abs = 0.0;
    for (double v : matrix.values()) {
        if (!std::isfinite(v)) {
            throw InputError("dense oracle: non-finite input");
        }
        max_abs = std::max(max_abs, std::abs(v));
    }
    if (max_asymmetry(matrix) > 1e-12 * std::max(1.0, max_abs)) {
        throw InputError("dense oracle: matrix is not symmetric");
    }

    DenseMatrix a = matrix;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = s;
            a(j, i) = s;
        }
    }
    double frob_sq = 0.0;
    for (double v : a.values()) {
        frob_sq += v * v;
    }
    const double target_sq = 1e-26 * frob_sq;  // (1e-13 ‖H‖)^2

    auto off_sq = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                s += 2.0 * a(i, j) * a(i, j);
            }
        }
        return s;
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_sq() > target_sq; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Symmetric Schur decomposition of the (p,q) 2x2 block.
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    SpectrumResult result;
    result.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.eigenvalues[i] = a(i, i);
    }
    std::sort(result.eigenvalues.begin(), result.eigenvalues.end());
    // Off-diagonal remainder bounds the eigenvalue error (Weyl), plus roundoff.
    result.residual_bound = std::sqrt(off_sq()) +
                            64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(frob_sq);
    return result;
}

SpectrumResult eigenvalues(const BandedSymmetricMatrix& h) {
    if (h.bandwidth() <= 1) {
        const auto diag = h.diagonal();
        if (h.bandwidth() == 0) {
            std::vector<double> zeros(h.dim() - 1, 0.0);
            return eigenvalues_tridiag(diag, zeros);
        }
        return eigenvalues_tridiag(diag, h.band(1));
    }
    return eigenvalues_dense(h.to_dense());
}

} // namespace bandflow::oracle
