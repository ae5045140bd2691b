#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bandflow/errors.hpp"
#include "bandflow/flow.hpp"
#include "bandflow/oracle.hpp"
#include "test_support.hpp"

using namespace bandflow;

namespace {

BandedSymmetricMatrix tridiag123() {
    return BandedSymmetricMatrix::tridiagonal(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1});
}

} // namespace

TEST_CASE("generator signs") {
    const auto h = testsupport::random_banded(6, 2, 1);
    const auto eta = mielke_eta(h);
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK(eta.get(n, n) == 0.0);
        for (std::size_t m = 0; m < 6; ++m) {
            CHECK(eta.get(n, m) == -eta.get(m, n));
            if (n > m) CHECK(eta.get(n, m) == h.get(n, m));
        }
    }
}

TEST_CASE("band stencil equals the full commutator") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (std::size_t bw : {1u, 2u, 3u, 5u}) {
            const auto h = testsupport::random_banded(13, bw, seed * 31 + bw);
            const auto fast = mielke_rhs(h);
            const auto ref = testsupport::mielke_rhs_reference(testsupport::to_plain(h));
            const double scale = testsupport::max_abs(ref);
            for (std::size_t i = 0; i < 13; ++i)
                for (std::size_t j = 0; j < 13; ++j) {
                    // outside the band the reference must vanish too
                    CHECK(std::abs(fast.get(i, j) - ref[i][j]) <= 1e-13 * scale);
                }
        }
    }
}

TEST_CASE("wegner right-hand side equals the reference double commutator") {
    const auto h = testsupport::random_banded(9, 8, 4);
    const DenseMatrix fast = wegner_rhs(h.to_dense());
    const auto ref = testsupport::wegner_rhs_reference(testsupport::to_plain(h));
    const double scale = testsupport::max_abs(ref);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) CHECK(std::abs(fast(i, j) - ref[i][j]) <= 1e-13 * scale);
}

TEST_CASE("2x2 flow reaches the sorted eigenvalues") {
    const auto h = BandedSymmetricMatrix::tridiagonal(std::vector<double>{3.0, -1.0}, std::vector<double>{0.5});
    const FlowResult r = integrate_flow(h, {});
    REQUIRE(r.converged);
    const double mid = 1.0;
    const double rad = std::sqrt(4.0 + 0.25);
    CHECK(r.final.get(0, 0) == doctest::Approx(mid - rad).epsilon(1e-10));
    CHECK(r.final.get(1, 1) == doctest::Approx(mid + rad).epsilon(1e-10));
}

TEST_CASE("diagonal input converges immediately") {
    const auto h = BandedSymmetricMatrix::diagonal(std::vector<double>{2, 1, 3});
    const FlowResult r = integrate_flow(h, {});
    CHECK(r.converged);
    CHECK(r.ell_final == 0.0);
    CHECK(r.steps == 0);
    CHECK(r.final == h);
}

TEST_CASE("random banded flows match the oracle, sort the diagonal and conserve invariants") {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const auto h = testsupport::random_banded(24, 3, seed);
        FlowConfig cfg;
        cfg.record_steps = true;
        const FlowResult r = integrate_flow(h, cfg);
        REQUIRE(r.converged);
        CHECK(r.final.bandwidth() == 3);
        const auto ev = oracle::eigenvalues(h).eigenvalues;
        const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
        const auto diag = r.final.diagonal();
        const double spec_bound = 10.0 * cfg.convergence_tol * std::sqrt(frobenius_norm_sq(h));
        for (std::size_t i = 0; i < ev.size(); ++i) {
            CHECK(std::abs(diag[i] - ev[i]) <= 1e-8 * scale);
            CHECK(std::abs(diag[i] - ev[i]) <= spec_bound);
        }
        CHECK(std::is_sorted(diag.begin(), diag.end()));
        CHECK(r.diagnostics.trace_drift <= 1e-9 * std::max(1.0, std::abs(trace(h))));
        CHECK(r.diagnostics.frobenius_drift <= 1e-9);
        CHECK(r.diagnostics.partial_trace_violation <= 1e-9);
        REQUIRE(r.trace.size() >= 2);
        CHECK(r.trace.front().ell == 0.0);
        CHECK(r.trace.back().ell == r.ell_final);
    }
}

TEST_CASE("reducible inputs flow block by block") {
    auto h = BandedSymmetricMatrix::tridiagonal(std::vector<double>{5, 4, 1, 0}, std::vector<double>{1, 0, 1});
    const FlowResult r = integrate_flow(h, {});
    REQUIRE(r.converged);
    REQUIRE(r.blocks.size() == 2);
    // Each block is sorted on its own; the blocks are not interleaved.
    CHECK(r.final.get(0, 0) < r.final.get(1, 1));
    CHECK(r.final.get(2, 2) < r.final.get(3, 3));
    CHECK(r.final.get(0, 0) > r.final.get(3, 3));
    CHECK(r.final.get(1, 2) == 0.0);
}

TEST_CASE("snapshots land exactly on the requested flow parameters") {
    FlowConfig cfg;
    cfg.snapshot_ells = {0.0, 0.5, 1.0, 2.0};
    const FlowResult r = integrate_flow(tridiag123(), cfg);
    REQUIRE(r.snapshots.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.snapshots[i].ell == cfg.snapshot_ells[i]);
    CHECK(r.snapshots[0].matrix == tridiag123());
}

TEST_CASE("off-diagonal decay follows the eigenvalue gap") {
    FlowConfig cfg;
    for (int i = 0; i <= 40; ++i) cfg.snapshot_ells.push_back(0.25 * i);
    cfg.convergence_tol = 1e-13;
    const FlowResult r = integrate_flow(tridiag123(), cfg);
    const double rate = decay_rate_estimate(r.snapshots, 0, 1);
    CHECK(rate == doctest::Approx(std::sqrt(3.0)).epsilon(0.02));
    CHECK_THROWS_AS(decay_rate_estimate(std::span<const Snapshot>(r.snapshots).first(2), 0, 1), InputError);
}

TEST_CASE("wegner mode diagonalizes without sorting and fills the band") {
    const auto h = BandedSymmetricMatrix::tridiagonal(std::vector<double>{1, 2, 4}, std::vector<double>{1, 1});
    FlowConfig cfg;
    cfg.generator = GeneratorKind::Wegner;
    cfg.snapshot_ells = {0.01};
    const FlowResult r = integrate_flow(h, cfg);
    REQUIRE(r.converged);
    CHECK(r.final.bandwidth() == 2);
    REQUIRE(r.snapshots.size() == 1);
    CHECK(std::abs(r.snapshots[0].matrix.get(0, 2)) > 0.0);
    auto diag = std::vector<double>(r.final.diagonal().begin(), r.final.diagonal().end());
    std::sort(diag.begin(), diag.end());
    const auto ev = oracle::eigenvalues(h).eigenvalues;
    for (std::size_t i = 0; i < 3; ++i) CHECK(diag[i] == doctest::Approx(ev[i]).epsilon(1e-8));
}

TEST_CASE("configuration errors") {
    FlowConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_flow(tridiag123(), cfg), InputError);
    cfg = {};
    cfg.ell_max = -1.0;
    CHECK_THROWS_AS(integrate_flow(tridiag123(), cfg), InputError);
    cfg = {};
    cfg.snapshot_ells = {1.0, 0.5};
    CHECK_THROWS_AS(integrate_flow(tridiag123(), cfg), InputError);
    cfg = {};
    cfg.generator = GeneratorKind::Wegner;
    CHECK_THROWS_AS(integrate_flow(testsupport::random_banded(kWegnerMaxDim + 1, 1, 0), cfg), InputError);
}

TEST_CASE("hitting the cap reports non-convergence with partial results") {
    FlowConfig cfg;
    cfg.ell_max = 0.1;
    const FlowResult r = integrate_flow(tridiag123(), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.ell_final == doctest::Approx(0.1));
    CHECK(offdiag_norm_sq(r.final) > 0.0);
}

TEST_CASE("default cap scales inversely with the spectral spread") {
    const auto h = tridiag123();
    BandedSymmetricMatrix h2 = h;
    for (double& v : h2.values()) v *= 2.0;
    CHECK(default_ell_max(h2, GeneratorKind::Mielke) == doctest::Approx(0.5 * default_ell_max(h, GeneratorKind::Mielke)));
    CHECK(default_ell_max(h2, GeneratorKind::Wegner) == doctest::Approx(0.25 * default_ell_max(h, GeneratorKind::Wegner)));
}
