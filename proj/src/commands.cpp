#include "bandflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "bandflow/errors.hpp"
#include "bandflow/oracle.hpp"
#include "bandflow/parallel.hpp"
#include "bandflow/text_io.hpp"

namespace bandflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> trace_header(std::size_t dim) {
    std::vector<std::string> header{"ell", "trace", "frob_sq", "offdiag_sq"};
    for (std::size_t n = 0; n < dim; ++n) {
        header.push_back("h" + std::to_string(n) + "_" + std::to_string(n));
    }
    return header;
}

void write_trace_row(CsvWriter& csv, double ell, double tr, double frob, double off,
                     std::span<const double> diag) {
    csv.cell(ell).cell(tr).cell(frob).cell(off);
    for (double d : diag) {
        csv.cell(d);
    }
    csv.end_row();
}

std::vector<double> sorted_diagonal(const BandedSymmetricMatrix& h) {
    std::vector<double> d(h.diagonal().begin(), h.diagonal().end());
    std::sort(d.begin(), d.end());
    return d;
}

const char* branch_label(Branch b) { return b == Branch::Plus ? "+" : "-"; }

SpectrumRow spinboson_row(std::size_t n, double eps_flow, double eps_oracle, const SpinBosonParams& params,
                          const ValidityThresholds& thresholds) {
    SpectrumRow row;
    row.sector = branch_label(params.branch);
    row.n = n;
    row.eps_flow = eps_flow;
    row.eps_oracle = eps_oracle;
    row.eps_asym1 = row.eps_asym2 = row.rel_err_asym1 = row.rel_err_asym2 = kNaN;
    row.cond_f = row.cond_order = kNaN;
    if (n == 0) {
        return row;
    }
    const AsymptoticEigenvalue a1 = spinboson_eps_asym(n, params, AsymptoticFormula::Bessel);
    row.eps_asym1 = a1.value;
    row.rel_err_asym1 = relative_error(a1.value, eps_flow);
    row.cond_f = a1.cond_f;
    row.cond_order = a1.cond_order;
    row.valid = is_valid(a1, thresholds);
    if (params.lambda > 0.0) {
        row.eps_asym2 = spinboson_eps_asym(n, params, AsymptoticFormula::Cosine).value;
        row.rel_err_asym2 = relative_error(row.eps_asym2, eps_flow);
    }
    return row;
}

SpectrumReport lipkin_spectrum(const SpectrumOptions& options) {
    const LipkinParams& p = options.lipkin;
    p.validate();
    SpectrumReport report;
    for (LipkinBlock block : {LipkinBlock::A, LipkinBlock::B}) {
        const BandedSymmetricMatrix h = build_lipkin_block(p, block);
        const FlowResult flow = integrate_flow(h, options.flow);
        report.converged = report.converged && flow.converged;
        const std::vector<double> eps_flow = sorted_diagonal(flow.final);
        const std::vector<double> eps_oracle = oracle::eigenvalues(h).eigenvalues;
        for (std::size_t n = 0; n < h.dim(); ++n) {
            if (!options.levels.empty() &&
                std::find(options.levels.begin(), options.levels.end(), n) == options.levels.end()) {
                continue;
            }
            SpectrumRow row;
            row.sector = block == LipkinBlock::A ? "A" : "B";
            row.n = n;
            row.eps_flow = eps_flow[n];
            row.eps_oracle = eps_oracle[n];
            row.eps_asym1 = row.eps_asym2 = row.rel_err_asym2 = kNaN;
            row.cond_f = row.cond_order = kNaN;
            if (4.0 * p.j() * p.v0 < p.xi0) {
                row.eps_asym1 = lipkin_rpa_spectrum(p, n, block);
                row.valid = true;
            }
            row.rel_err_asym1 = relative_error(row.eps_asym1, row.eps_flow);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

SpectrumReport spinboson_spectrum(const SpectrumOptions& options) {
    SpinBosonParams p = options.spinboson;
    p.validate();
    std::vector<std::size_t> levels = options.levels;
    if (levels.empty()) {
        levels = {0, 1, 2, 3, 4, 5};
    }
    const std::size_t top = *std::max_element(levels.begin(), levels.end());
    if (options.certify) {
        p.n_trunc = certify_truncation(p, top);
    } else if (p.n_trunc <= top) {
        throw InputError("n_trunc must exceed the highest requested level");
    }
    const BandedSymmetricMatrix h = build_spinboson(p);
    const FlowResult flow = integrate_flow(h, options.flow);
    const std::vector<double> eps_flow = sorted_diagonal(flow.final);
    const std::vector<double> eps_oracle = oracle::eigenvalues(h).eigenvalues;

    SpectrumReport report;
    report.converged = flow.converged;
    report.n_trunc = p.n_trunc;
    for (std::size_t n : levels) {
        report.rows.push_back(spinboson_row(n, eps_flow[n], eps_oracle[n], p, options.thresholds));
    }
    return report;
}

} // namespace

void write_flow_trace(std::ostream& out, const FlowResult& result, TraceMode mode) {
    const std::size_t dim = result.final.dim();
    CsvWriter csv(out, trace_header(dim));
    if (mode == TraceMode::Steps) {
        for (const TraceRow& row : result.trace) {
            write_trace_row(csv, row.ell, row.trace, row.frob_sq, row.offdiag_sq, row.diagonal);
        }
        return;
    }
    for (const Snapshot& snap : result.snapshots) {
        write_trace_row(csv, snap.ell, trace(snap.matrix), frobenius_norm_sq(snap.matrix),
                        offdiag_norm_sq(snap.matrix), snap.matrix.diagonal());
    }
}

void write_flow_summary(std::ostream& out, const FlowResult& result) {
    out << "converged: " << (result.converged ? "yes" : "no") << '\n';
    out << "ell_final: " << format_double(result.ell_final) << '\n';
    out << "steps: " << result.steps << '\n';
    out << "blocks: " << result.blocks.size() << '\n';
    out << "offdiag_norm_sq: " << format_double(offdiag_norm_sq(result.final)) << '\n';
    out << "trace_drift: " << format_double(result.diagnostics.trace_drift) << '\n';
    out << "frobenius_drift: " << format_double(result.diagnostics.frobenius_drift) << '\n';
    out << "partial_trace_violation: " << format_double(result.diagnostics.partial_trace_violation) << '\n';
    out << "diagonal:";
    for (double d : result.final.diagonal()) {
        out << ' ' << format_double(d);
    }
    out << '\n';
}

double relative_error(double approx, double exact) {
    if (std::isnan(approx) || std::isnan(exact) || exact == 0.0) {
        return kNaN;
    }
    return std::abs(approx - exact) / std::abs(exact);
}

SpectrumReport run_spectrum(const SpectrumOptions& options) {
    options.flow.validate();
    return options.model == ModelKind::Lipkin ? lipkin_spectrum(options) : spinboson_spectrum(options);
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
    CsvWriter csv(out, {"sector", "n", "eps_flow", "eps_oracle", "eps_asym1", "eps_asym2",
                        "rel_err_asym1", "rel_err_asym2", "cond_f", "cond_order", "valid"});
    for (const SpectrumRow& r : report.rows) {
        csv.cell(r.sector)
            .cell(static_cast<long long>(r.n))
            .cell(r.eps_flow)
            .cell(r.eps_oracle)
            .cell(r.eps_asym1)
            .cell(r.eps_asym2)
            .cell(r.rel_err_asym1)
            .cell(r.rel_err_asym2)
            .cell(r.cond_f)
            .cell(r.cond_order)
            .cell(static_cast<long long>(r.valid ? 1 : 0));
        csv.end_row();
    }
}

std::vector<double> default_delta_grid() {
    std::vector<double> grid(26);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = 0.2 * static_cast<double>(i);
    }
    return grid;
}

Fig1Report run_fig1(const Fig1Options& options) {
    options.flow.validate();
    if (!(options.omega > 0.0) || !(options.lambda_over_omega >= 0.0)) {
        throw InputError("fig1 needs omega > 0 and lambda/omega >= 0");
    }
    if (options.n_list.empty()) {
        throw InputError("fig1 needs at least one level");
    }
    for (std::size_t n : options.n_list) {
        if (n == 0) throw InputError("fig1 levels must be >= 1");
    }
    const std::vector<double> grid = options.delta_over_omega.empty() ? default_delta_grid()
                                                                      : options.delta_over_omega;
    const std::size_t top = *std::max_element(options.n_list.begin(), options.n_list.end());

    auto params_for = [&](std::size_t task) {
        SpinBosonParams p;
        p.omega = options.omega;
        p.lambda = options.lambda_over_omega * options.omega;
        p.delta = grid[task / 2] * options.omega;
        p.branch = task % 2 == 0 ? Branch::Plus : Branch::Minus;
        p.n_trunc = options.n_trunc.value_or(2);
        return p;
    };

    struct TaskResult {
        std::vector<double> eps;  // sorted diagonal
        bool converged;
    };
    const std::vector<TaskResult> flows = parallel_map<TaskResult>(2 * grid.size(), [&](std::size_t task) {
        SpinBosonParams p = params_for(task);
        p.n_trunc = certify_truncation(p, top);
        const FlowResult flow = integrate_flow(build_spinboson(p), options.flow);
        return TaskResult{sorted_diagonal(flow.final), flow.converged};
    });

    Fig1Report report;
    for (std::size_t d = 0; d < grid.size(); ++d) {
        const TaskResult& plus = flows[2 * d];
        const TaskResult& minus = flows[2 * d + 1];
        report.converged = report.converged && plus.converged && minus.converged;
        for (std::size_t n : options.n_list) {
            const SpinBosonParams pp = params_for(2 * d);
            const SpinBosonParams pm = params_for(2 * d + 1);
            const AsymptoticEigenvalue ap = spinboson_eps_asym(n, pp, AsymptoticFormula::Bessel);
            const AsymptoticEigenvalue am = spinboson_eps_asym(n, pm, AsymptoticFormula::Bessel);
            Fig1Row row;
            row.delta_over_omega = grid[d];
            row.n = n;
            row.rel_err_plus = relative_error(ap.value, plus.eps[n]);
            row.rel_err_minus = relative_error(am.value, minus.eps[n]);
            row.rel_err_asym1 = std::max(row.rel_err_plus, row.rel_err_minus);
            row.cond_f = ap.cond_f;
            row.cond_order = ap.cond_order;
            row.valid = is_valid(ap, options.thresholds);
            row.ordering_ok = ordering_bound_check(n, pp).holds;
            report.rows.push_back(row);
        }
    }
    return report;
}

void write_fig1_csv(std::ostream& out, const Fig1Report& report) {
    CsvWriter csv(out, {"delta_over_omega", "n", "rel_err_asym1", "rel_err_plus", "rel_err_minus",
                        "cond_f", "cond_order", "valid", "ordering_ok"});
    for (const Fig1Row& r : report.rows) {
        csv.cell(r.delta_over_omega)
            .cell(static_cast<long long>(r.n))
            .cell(r.rel_err_asym1)
            .cell(r.rel_err_plus)
            .cell(r.rel_err_minus)
            .cell(r.cond_f)
            .cell(r.cond_order)
            .cell(static_cast<long long>(r.valid ? 1 : 0))
            .cell(static_cast<long long>(r.ordering_ok ? 1 : 0));
        csv.end_row();
    }
}

std::vector<double> default_scaled_grid() {
    return {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
}

CompareReport run_compare_generators(const CompareOptions& options) {
    BandedSymmetricMatrix h = options.matrix.value_or(
        BandedSymmetricMatrix::tridiagonal(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 1.0}));
    if (h.dim() > 64) {
        throw InputError("compare-generators is limited to N <= 64");
    }
    if (h.bandwidth() > 1) {
        throw InputError("compare-generators expects a tridiagonal matrix");
    }
    std::vector<double> grid = options.scaled_ells.empty() ? default_scaled_grid() : options.scaled_ells;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
            throw InputError("scaled flow times must be non-negative and strictly increasing");
        }
    }

    CompareReport report;
    report.norm = std::sqrt(frobenius_norm_sq(h));
    report.oracle_eigenvalues = oracle::eigenvalues(h).eigenvalues;
    const double norm = report.norm > 0.0 ? report.norm : 1.0;

    for (GeneratorKind gen : {GeneratorKind::Mielke, GeneratorKind::Wegner}) {
        const double scale = gen == GeneratorKind::Mielke ? 1.0 / norm : 1.0 / (norm * norm);
        FlowConfig cfg;
        cfg.generator = gen;
        cfg.rel_tol = options.rel_tol;
        cfg.abs_tol = options.abs_tol;
        cfg.convergence_tol = 1e-14;
        for (double s : grid) {
            cfg.snapshot_ells.push_back(s * scale);
        }
        cfg.ell_max = std::max(cfg.snapshot_ells.back(), std::numeric_limits<double>::min());
        const FlowResult traced = integrate_flow(h, cfg);

        for (std::size_t i = 0; i < grid.size(); ++i) {
            const BandedSymmetricMatrix& m = i < traced.snapshots.size() ? traced.snapshots[i].matrix : traced.final;
            for (std::size_t k = 0; k < h.dim(); ++k) {
                double worst = 0.0;
                for (std::size_t n = 0; n + k < h.dim(); ++n) {
                    worst = std::max(worst, std::abs(m.get(n, n + k)));
                }
                report.rows.push_back({gen, cfg.snapshot_ells[i], grid[i], k, worst});
            }
        }

        FlowConfig full;
        full.generator = gen;
        full.rel_tol = options.rel_tol;
        full.abs_tol = options.abs_tol;
        const FlowResult converged = integrate_flow(h, full);
        std::vector<double> diag(converged.final.diagonal().begin(), converged.final.diagonal().end());
        (gen == GeneratorKind::Mielke ? report.mielke_final_diagonal : report.wegner_final_diagonal) = diag;
    }
    return report;
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
    CsvWriter csv(out, {"generator", "ell", "ell_scaled", "offset", "max_abs"});
    for (const CompareRow& r : report.rows) {
        csv.cell(r.generator == GeneratorKind::Mielke ? "mielke" : "wegner")
            .cell(r.ell)
            .cell(r.ell_scaled)
            .cell(static_cast<long long>(r.offset))
            .cell(r.max_abs);
        csv.end_row();
    }
}

} // namespace bandflow
