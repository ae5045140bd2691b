#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bandflow/errors.hpp"
#include "bandflow/oracle.hpp"
#include "test_support.hpp"

using namespace bandflow;
using namespace bandflow::oracle;

TEST_CASE("bisection on small closed-form cases") {
    auto r = eigenvalues_tridiag(std::vector<double>{1, 2, 3}, std::vector<double>{0, 0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.eigenvalues[i] - (i + 1.0)) <= r.residual_bound);
    r = eigenvalues_tridiag(std::vector<double>{0, 0}, std::vector<double>{1});
    CHECK(r.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    r = eigenvalues_tridiag(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1});
    CHECK(std::abs(r.eigenvalues[0] - (2.0 - std::sqrt(3.0))) < 1e-11);
    CHECK(std::abs(r.eigenvalues[1] - 2.0) < 1e-11);
    CHECK(std::abs(r.eigenvalues[2] - (2.0 + std::sqrt(3.0))) < 1e-11);
}

TEST_CASE("bisection matches the Toeplitz closed form") {
    const std::size_t n = 40;
    const double a = 0.3;
    const double b = -0.7;
    const auto r = eigenvalues_tridiag(std::vector<double>(n, a), std::vector<double>(n - 1, b));
    std::vector<double> exact;
    for (std::size_t k = 1; k <= n; ++k)
        exact.push_back(a + 2.0 * b * std::cos(std::numbers::pi * static_cast<double>(k) / (n + 1.0)));
    std::sort(exact.begin(), exact.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r.eigenvalues[i] - exact[i]) < 1e-11);
    CHECK(r.residual_bound > 0.0);
}

TEST_CASE("multiplicities are counted") {
    const auto r = eigenvalues_tridiag(std::vector<double>{2, 2, 2, 5}, std::vector<double>{0, 0, 0});
    const std::vector<double> exact{2, 2, 2, 5};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.eigenvalues[i] - exact[i]) <= r.residual_bound);
}

TEST_CASE("sturm counts bracket every eigenvalue") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto [d, e] = testsupport::random_tridiag(25, seed);
        const auto ev = eigenvalues_tridiag(d, e).eigenvalues;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            CHECK(sturm_count(d, e, ev[i] - 1e-8) <= i);
            CHECK(sturm_count(d, e, ev[i] + 1e-8) >= i + 1);
        }
        CHECK(sturm_count(d, e, -1e9) == 0);
        CHECK(sturm_count(d, e, 1e9) == 25);
    }
}

TEST_CASE("lowest eigenvalues agree with the full set") {
    const auto [d, e] = testsupport::random_tridiag(30, 3);
    const auto all = eigenvalues_tridiag(d, e).eigenvalues;
    const auto low = eigenvalues_tridiag_lowest(d, e, 5).eigenvalues;
    REQUIRE(low.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(low[i] - all[i]) < 1e-11);
}

TEST_CASE("jacobi on small cases") {
    auto r = eigenvalues_dense(DenseMatrix::identity(4));
    CHECK(r.eigenvalues == std::vector<double>{1, 1, 1, 1});
    DenseMatrix swap(2);
    swap(0, 1) = swap(1, 0) = 1.0;
    r = eigenvalues_dense(swap);
    CHECK(r.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("the two oracles agree and reproduce the trace invariants") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto h = testsupport::random_banded(50, 1, seed + 1000);
        const auto bis = eigenvalues_tridiag(h.band(0), h.band(1)).eigenvalues;
        const auto jac = eigenvalues_dense(h.to_dense()).eigenvalues;
        double scale = 0.0;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < 50; ++i) {
            scale = std::max(scale, std::abs(jac[i]));
            sum += jac[i];
            sum_sq += jac[i] * jac[i];
        }
        for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(bis[i] - jac[i]) <= 1e-10 * scale);
        CHECK(std::abs(sum - trace(h)) <= 1e-10 * std::max(1.0, std::abs(trace(h))) * 10);
        CHECK(std::abs(sum_sq - frobenius_norm_sq(h)) <= 1e-10 * frobenius_norm_sq(h));
    }
}

TEST_CASE("dense oracle on wider bands matches bisection after nothing but a permutation") {
    // A symmetric permutation of a tridiagonal matrix has the same spectrum.
    const auto [d, e] = testsupport::random_tridiag(12, 77);
    const auto ev = eigenvalues_tridiag(d, e).eigenvalues;
    const std::vector<std::size_t> perm{3, 0, 11, 5, 7, 1, 9, 2, 10, 4, 8, 6};
    DenseMatrix p(12);
    for (std::size_t i = 0; i < 12; ++i) {
        p(perm[i], perm[i]) = d[i];
        if (i + 1 < 12) {
            p(perm[i], perm[i + 1]) = e[i];
            p(perm[i + 1], perm[i]) = e[i];
        }
    }
    const auto jac = eigenvalues_dense(p).eigenvalues;
    for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(jac[i] - ev[i]) < 1e-11);
}

TEST_CASE("oracle input validation") {
    CHECK_THROWS_AS(eigenvalues_tridiag(std::vector<double>{1, std::nan("")}, std::vector<double>{1}), InputError);
    CHECK_THROWS_AS(eigenvalues_tridiag(std::vector<double>{1, 2}, std::vector<double>{1, 1}), InputError);
    DenseMatrix a(2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(eigenvalues_dense(a), InputError);
    CHECK_THROWS_AS(eigenvalues_dense(DenseMatrix(kDenseMaxDim + 1)), InputError);
}
