#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bandflow/banded_matrix.hpp"
#include "bandflow/dense_matrix.hpp"

namespace bandflow {

/// Mielke: eta(n,m) = sign(n-m) h(n,m). Keeps the band and sorts the diagonal.
/// Wegner: eta = [H_d, H]. Fills the band; dense mode only, for comparison.
enum class GeneratorKind { Mielke, Wegner };

/// Largest dimension accepted in Wegner (dense) mode.
inline constexpr std::size_t kWegnerMaxDim = 256;

/// Antisymmetric matrix with a band profile, as produced by mielke_eta.
/// Stores the strictly lower triangle: lower(n+k, n) for 1 <= k <= bandwidth.
class BandedAntisymmetricMatrix {
public:
    explicit BandedAntisymmetricMatrix(BandedSymmetricMatrix lower_magnitudes)
        : lower_(std::move(lower_magnitudes)) {}

    std::size_t dim() const noexcept { return lower_.dim(); }
    std::size_t bandwidth() const noexcept { return lower_.bandwidth(); }

    /// eta(n,m) = -eta(m,n); eta(n,n) = 0.
    double get(std::size_t n, std::size_t m) const;

    DenseMatrix to_dense() const;

private:
    BandedSymmetricMatrix lower_;
};

struct FlowConfig {
    GeneratorKind generator = GeneratorKind::Mielke;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Converged when offdiag_norm_sq <= convergence_tol^2 * frobenius_norm_sq.
    double convergence_tol = 1e-10;
    /// Flow-parameter cap. Unset: default_ell_max(H0, generator).
    std::optional<double> ell_max;
    /// Sorted ascending; the integrator lands exactly on each of these.
    std::vector<double> snapshot_ells;
    /// Keep one TraceRow per accepted step.
    bool record_steps = false;
    std::size_t max_steps = 20'000'000;

    /// Throws InputError on non-positive tolerances, a non-positive cap or
    /// an unsorted snapshot schedule.
    void validate() const;
};

struct Snapshot {
    double ell = 0.0;
    BandedSymmetricMatrix matrix;
};

struct TraceRow {
    double ell = 0.0;
    double trace = 0.0;
    double frob_sq = 0.0;
    double offdiag_sq = 0.0;
    std::vector<double> diagonal;
};

/// Worst deviations seen over all accepted steps.
struct ConservationReport {
    double trace_drift = 0.0;              ///< max |tr H(l) - tr H(0)|
    double frobenius_drift = 0.0;          ///< max |‖H(l)‖² - ‖H(0)‖²| / ‖H(0)‖²
    double partial_trace_violation = 0.0;  ///< max over r, steps of any increase of partial_trace(H, r)
};

struct FlowResult {
    BandedSymmetricMatrix final;
    double ell_final = 0.0;
    bool converged = false;
    std::vector<IrreducibleBlock> blocks;
    /// Requested snapshots with ell <= ell_final. Blocks that converged
    /// earlier than a snapshot contribute their final state.
    std::vector<Snapshot> snapshots;
    /// Accepted steps (record_steps only), merged across blocks.
    std::vector<TraceRow> trace;
    ConservationReport diagnostics;
    std::size_t steps = 0;
};

BandedAntisymmetricMatrix mielke_eta(const BandedSymmetricMatrix& h);

/// dH/dl = [eta, H] for eta(n,m) = sign(n-m) h(n,m), evaluated as a band
/// stencil. The result has the same bandwidth as h.
BandedSymmetricMatrix mielke_rhs(const BandedSymmetricMatrix& h);

/// dH/dl = [[H_d, H], H] on a dense symmetric matrix.
DenseMatrix wegner_rhs(const DenseMatrix& h);

/// Flow-parameter cap used when FlowConfig::ell_max is unset, with s the
/// Gershgorin spread: 50 N³ / s for Mielke and 50 (N² / s)² for Wegner.
double default_ell_max(const BandedSymmetricMatrix& h, GeneratorKind generator);

/// Integrates dH/dl = [eta, H] from l = 0 until the relative off-diagonal norm
/// drops below config.convergence_tol or l reaches the cap. Reducible inputs
/// are split into irreducible blocks that are flowed independently.
///
/// Throws FlowError when the step size underflows, InputError for invalid
/// configs (including Wegner mode above kWegnerMaxDim).
FlowResult integrate_flow(const BandedSymmetricMatrix& h0, const FlowConfig& config);

/// Late-l exponential decay rate of |h(n,m)|: the negated least-squares slope
/// of ln|h(n,m)| against l over the later half of the snapshots where
/// |h(n,m)| >= 1e-12 ‖H‖ (at least three points).
double decay_rate_estimate(std::span<const Snapshot> snapshots, std::size_t n, std::size_t m);

} // namespace bandflow
