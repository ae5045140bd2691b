#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bandflow {

/// Square row-major matrix. Used for Wegner's generator (which fills the band)
/// and by the Jacobi reference eigensolver.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t dim) : dim_(dim), values_(dim * dim, 0.0) {}

    static DenseMatrix identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }

    double& operator()(std::size_t row, std::size_t col) { return values_[row * dim_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return values_[row * dim_ + col]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b);

/// Largest |a(i,j) - a(j,i)|.
double max_asymmetry(const DenseMatrix& a);

} // namespace bandflow
