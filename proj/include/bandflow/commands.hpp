#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bandflow/analytics.hpp"
#include "bandflow/flow.hpp"
#include "bandflow/models.hpp"

namespace bandflow {

/// Process exit statuses of the command-line tool.
enum ExitStatus : int {
    kExitConverged = 0,
    kExitNotConverged = 2,
    kExitInputError = 3,
    kExitTruncationError = 4,
};

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

enum class TraceMode { Steps, Snapshots };

/// Trace CSV: ell, trace, frob_sq, offdiag_sq, h00, h11, ...
/// Steps mode needs config.record_steps; snapshots mode uses the snapshots.
void write_flow_trace(std::ostream& out, const FlowResult& result, TraceMode mode);

/// Human-readable summary: final diagonal, convergence and conservation diagnostics.
void write_flow_summary(std::ostream& out, const FlowResult& result);

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

enum class ModelKind { Lipkin, SpinBoson };

struct SpectrumOptions {
    ModelKind model = ModelKind::SpinBoson;
    LipkinParams lipkin;
    SpinBosonParams spinboson;
    /// Levels to report. Empty: every level of both Lipkin blocks, or 0..5
    /// for the spin-boson model.
    std::vector<std::size_t> levels;
    /// Spin-boson only: certify n_trunc by doubling (the given n_trunc is a floor).
    bool certify = true;
    FlowConfig flow;
    ValidityThresholds thresholds;
};

struct SpectrumRow {
    std::string sector;  ///< "A"/"B" for Lipkin, "+"/"-" for the spin-boson branch
    std::size_t n = 0;
    double eps_flow = 0.0;
    double eps_oracle = 0.0;
    double eps_asym1 = 0.0;      ///< RPA (Lipkin) or Bessel form; NaN where undefined
    double eps_asym2 = 0.0;      ///< cosine form; NaN where undefined
    double rel_err_asym1 = 0.0;  ///< |eps_asym1 - eps_flow| / |eps_flow|
    double rel_err_asym2 = 0.0;
    double cond_f = 0.0;
    double cond_order = 0.0;
    /// Spin-boson: both validity parameters under their thresholds.
    /// Lipkin: the RPA solution exists (4 J V0 < xi0).
    bool valid = false;
};

struct SpectrumReport {
    std::vector<SpectrumRow> rows;
    bool converged = true;
    std::size_t n_trunc = 0;  ///< spin-boson truncation actually used
};

/// Builds the model, flows every block to convergence and tabulates flow,
/// oracle and closed-form values. Throws TruncationError when the spin-boson
/// truncation cannot be certified.
SpectrumReport run_spectrum(const SpectrumOptions& options);

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

/// |approx - exact| / |exact|, NaN when exact == 0 or either side is NaN.
double relative_error(double approx, double exact);

// ---------------------------------------------------------------------------
// fig1
// ---------------------------------------------------------------------------

struct Fig1Options {
    double omega = 1.0;
    double lambda_over_omega = 4.0;
    std::vector<std::size_t> n_list{10, 15, 20};
    std::vector<double> delta_over_omega;  ///< empty: 26 points on [0, 5]
    std::optional<std::size_t> n_trunc;    ///< floor for the certified truncation
    FlowConfig flow;
    ValidityThresholds thresholds;
};

struct Fig1Row {
    double delta_over_omega = 0.0;
    std::size_t n = 0;
    double rel_err_asym1 = 0.0;  ///< worse of the two branches
    double rel_err_plus = 0.0;
    double rel_err_minus = 0.0;
    double cond_f = 0.0;
    double cond_order = 0.0;
    bool valid = false;
    bool ordering_ok = true;
};

struct Fig1Report {
    std::vector<Fig1Row> rows;  ///< grouped by delta, then by n in n_list order
    bool converged = true;
};

/// One flow per (Delta, branch) pair, run in parallel; every n is read off
/// the same converged diagonal.
Fig1Report run_fig1(const Fig1Options& options);

void write_fig1_csv(std::ostream& out, const Fig1Report& report);

std::vector<double> default_delta_grid();

// ---------------------------------------------------------------------------
// compare-generators
// ---------------------------------------------------------------------------

struct CompareOptions {
    /// Tridiagonal test matrix; default diag (1,2,3), off (1,1).
    std::optional<BandedSymmetricMatrix> matrix;
    /// Dimensionless flow times s; Mielke runs to l = s/‖H‖, Wegner to
    /// l = s/‖H‖² with ‖H‖ the Frobenius norm. Empty: a default grid.
    std::vector<double> scaled_ells;
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
};

struct CompareRow {
    GeneratorKind generator = GeneratorKind::Mielke;
    double ell = 0.0;
    double ell_scaled = 0.0;
    std::size_t offset = 0;
    double max_abs = 0.0;  ///< max |h(n, n+offset)|
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double norm = 0.0;  ///< Frobenius norm of the input
    std::vector<double> mielke_final_diagonal;
    std::vector<double> wegner_final_diagonal;
    std::vector<double> oracle_eigenvalues;
};

CompareReport run_compare_generators(const CompareOptions& options);

void write_compare_csv(std::ostream& out, const CompareReport& report);

std::vector<double> default_scaled_grid();

} // namespace bandflow
