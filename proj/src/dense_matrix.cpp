#include "bandflow/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "bandflow/errors.hpp"

namespace bandflow {

DenseMatrix DenseMatrix::identity(std::size_t dim) {
    DenseMatrix out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.dim() != b.dim()) {
        throw InputError("multiply: dimension mismatch");
    }
    const std::size_t n = a.dim();
    DenseMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix ab = multiply(a, b);
    const DenseMatrix ba = multiply(b, a);
    auto out = ab.values();
    auto rhs = ba.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] -= rhs[i];
    }
    return ab;
}

double max_asymmetry(const DenseMatrix& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = i + 1; j < a.dim(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
        }
    }
    return worst;
}

} // namespace bandflow
