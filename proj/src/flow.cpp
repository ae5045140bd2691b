#include "bandflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandflow/errors.hpp"
#include "bandflow/ode.hpp"

namespace bandflow {

namespace {

/// Index arithmetic for the flat diagonal-major layout of BandedSymmetricMatrix.
struct BandLayout {
    std::size_t dim;
    std::size_t bandwidth;

    std::size_t offset(std::size_t k) const noexcept { return k * dim - k * (k - 1) / 2; }
    /// Flat index of h(a, b) for a <= b <= a + bandwidth.
    std::size_t at(std::size_t a, std::size_t b) const noexcept { return offset(b - a) + a; }
};

void mielke_rhs_flat(const BandLayout& layout, std::span<const double> h, std::span<double> out) {
    const std::size_t dim = layout.dim;
    const std::size_t bw = layout.bandwidth;
    std::vector<const double*> bands(bw + 1);
    for (std::size_t k = 0; k <= bw; ++k) bands[k] = h.data() + layout.offset(k);
    auto entry = [&](std::size_t a, std::size_t b) { return bands[b - a][a]; };

    for (std::size_t n = 0; n < dim; ++n) {
        double acc = 0.0;
        const std::size_t lo = n > bw ? n - bw : 0;
        for (std::size_t j = lo; j < n; ++j) {
            const double v = entry(j, n);
            acc += v * v;
        }
        const std::size_t hi = std::min(dim - 1, n + bw);
        for (std::size_t j = n + 1; j <= hi; ++j) {
            const double v = entry(n, j);
            acc -= v * v;
        }
        out[n] = 2.0 * acc;
    }

    for (std::size_t k = 1; k <= bw; ++k) {
        for (std::size_t n = 0; n + k < dim; ++n) {
            const std::size_t m = n + k;
            double val = (entry(n, n) - entry(m, m)) * entry(n, m);
            // j < n: sign(n-j) + sign(m-j) = 2; needs m - j <= bw.
            double below = 0.0;
            for (std::size_t j = m > bw ? m - bw : 0; j < n; ++j) {
                below += entry(j, n) * entry(j, m);
            }
            // j > m: sign sum = -2; needs j - n <= bw.
            double above = 0.0;
            const std::size_t hi = std::min(dim - 1, n + bw);
            for (std::size_t j = m + 1; j <= hi; ++j) {
                above += entry(n, j) * entry(m, j);
            }
            out[layout.at(n, m)] = val + 2.0 * (below - above);
        }
    }
}

void wegner_rhs_flat(const BandLayout& layout, std::span<const double> h, std::span<double> out,
                     DenseMatrix& scratch) {
    const std::size_t dim = layout.dim;
    for (std::size_t k = 0; k <= layout.bandwidth; ++k) {
        for (std::size_t n = 0; n + k < dim; ++n) {
            const double v = h[layout.at(n, n + k)];
            scratch(n, n + k) = v;
            scratch(n + k, n) = v;
        }
    }
    const DenseMatrix rhs = wegner_rhs(scratch);
    for (std::size_t k = 0; k <= layout.bandwidth; ++k) {
        for (std::size_t n = 0; n + k < dim; ++n) {
            out[layout.at(n, n + k)] = rhs(n, n + k);
        }
    }
}

struct BlockFlow {
    BandedSymmetricMatrix final;
    double ell_final = 0.0;
    bool converged = false;
    std::vector<Snapshot> snapshots;
    std::vector<TraceRow> rows;
    double trace_drift = 0.0;
    double frob_drift_abs = 0.0;
    double frob0 = 0.0;
    double partial_violation = 0.0;
    std::size_t steps = 0;
};

TraceRow make_row(double ell, const BandedSymmetricMatrix& h) {
    TraceRow row;
    row.ell = ell;
    row.trace = trace(h);
    row.offdiag_sq = offdiag_norm_sq(h);
    row.frob_sq = frobenius_norm_sq(h);
    row.diagonal.assign(h.diagonal().begin(), h.diagonal().end());
    return row;
}

BlockFlow flow_block(const BandedSymmetricMatrix& h0, const FlowConfig& config, double ell_max) {
    BlockFlow out;
    const BandLayout layout{h0.dim(), h0.bandwidth()};
    const double tol_sq = config.convergence_tol * config.convergence_tol;

    BandedSymmetricMatrix current = h0;
    const std::size_t dim = h0.dim();
    const double trace0 = trace(h0);
    out.frob0 = frobenius_norm_sq(h0);

    std::vector<double> prefix_old(dim);
    std::vector<double> prefix_new(dim);
    auto prefix_sums = [&](std::span<const double> diag, std::vector<double>& prefix) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            s += diag[i];
            prefix[i] = s;
        }
    };
    prefix_sums(current.diagonal(), prefix_old);

    std::size_t next_snap = 0;
    auto take_snapshots = [&](double ell) {
        while (next_snap < config.snapshot_ells.size() && config.snapshot_ells[next_snap] <= ell) {
            out.snapshots.push_back({config.snapshot_ells[next_snap], current});
            ++next_snap;
        }
    };

    if (config.record_steps) {
        out.rows.push_back(make_row(0.0, current));
    }
    take_snapshots(0.0);

    auto is_converged = [&](const BandedSymmetricMatrix& h) {
        return offdiag_norm_sq(h) <= tol_sq * frobenius_norm_sq(h);
    };
    if (dim == 1 || is_converged(current)) {
        out.final = current;
        out.converged = true;
        return out;
    }

    DenseMatrix scratch(config.generator == GeneratorKind::Wegner ? dim : 0);
    DormandPrince::Rhs rhs;
    if (config.generator == GeneratorKind::Mielke) {
        rhs = [layout](double, std::span<const double> y, std::span<double> dy) {
            mielke_rhs_flat(layout, y, dy);
        };
    } else {
        rhs = [layout, &scratch](double, std::span<const double> y, std::span<double> dy) {
            wegner_rhs_flat(layout, y, dy, scratch);
        };
    }

    StepControl control{config.rel_tol, config.abs_tol, 0.0};
    DormandPrince stepper(rhs, std::vector<double>(h0.values().begin(), h0.values().end()), 0.0,
                          control);

    while (true) {
        double limit = ell_max;
        if (next_snap < config.snapshot_ells.size()) {
            limit = std::min(limit, config.snapshot_ells[next_snap]);
        }
        try {
            stepper.step(limit);
        } catch (const StepSizeUnderflow& e) {
            throw FlowError(e.t(), frobenius_norm_sq(current), offdiag_norm_sq(current),
                            "flow integration failed: step size underflow at l = " +
                                std::to_string(e.t()) + " (offdiag_sq = " +
                                std::to_string(offdiag_norm_sq(current)) + ")");
        }
        const auto y = stepper.y();
        std::copy(y.begin(), y.end(), current.values().begin());
        ++out.steps;
        const double ell = stepper.t();

        out.trace_drift = std::max(out.trace_drift, std::abs(trace(current) - trace0));
        const double frob = frobenius_norm_sq(current);
        out.frob_drift_abs = std::max(out.frob_drift_abs, std::abs(frob - out.frob0));
        prefix_sums(current.diagonal(), prefix_new);
        for (std::size_t r = 0; r < dim; ++r) {
            out.partial_violation = std::max(out.partial_violation, prefix_new[r] - prefix_old[r]);
        }
        prefix_old.swap(prefix_new);

        if (config.record_steps) {
            out.rows.push_back(make_row(ell, current));
        }
        take_snapshots(ell);

        if (offdiag_norm_sq(current) <= tol_sq * frob) {
            out.converged = true;
            break;
        }
        if (ell >= ell_max || out.steps >= config.max_steps) {
            break;
        }
    }
    out.final = current;
    out.ell_final = stepper.t();
    return out;
}

} // namespace

double BandedAntisymmetricMatrix::get(std::size_t n, std::size_t m) const {
    if (n == m) {
        // Still range-checks the index.
        (void)lower_.get(n, m);
        return 0.0;
    }
    const double v = lower_.get(n, m);
    return n > m ? v : -v;
}

DenseMatrix BandedAntisymmetricMatrix::to_dense() const {
    DenseMatrix out(dim());
    for (std::size_t k = 1; k <= bandwidth(); ++k) {
        const auto b = lower_.band(k);
        for (std::size_t n = 0; n < b.size(); ++n) {
            out(n + k, n) = b[n];
            out(n, n + k) = -b[n];
        }
    }
    return out;
}

void FlowConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(convergence_tol > 0.0)) {
        throw InputError("flow tolerances must be positive");
    }
    if (ell_max && !(*ell_max > 0.0)) {
        throw InputError("ell_max must be positive");
    }
    for (std::size_t i = 0; i < snapshot_ells.size(); ++i) {
        if (!std::isfinite(snapshot_ells[i]) || snapshot_ells[i] < 0.0) {
            throw InputError("snapshot ells must be finite and non-negative");
        }
        if (i > 0 && snapshot_ells[i] < snapshot_ells[i - 1]) {
            throw InputError("snapshot ells must be sorted ascending");
        }
    }
}

BandedAntisymmetricMatrix mielke_eta(const BandedSymmetricMatrix& h) {
    BandedSymmetricMatrix lower = h;
    for (double& d : lower.band(0)) {
        d = 0.0;
    }
    return BandedAntisymmetricMatrix(std::move(lower));
}

BandedSymmetricMatrix mielke_rhs(const BandedSymmetricMatrix& h) {
    BandedSymmetricMatrix out(h.dim(), h.bandwidth());
    mielke_rhs_flat(BandLayout{h.dim(), h.bandwidth()}, h.values(), out.values());
    return out;
}

DenseMatrix wegner_rhs(const DenseMatrix& h) {
    const std::size_t dim = h.dim();
    DenseMatrix eta(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        for (std::size_t m = 0; m < dim; ++m) {
            eta(n, m) = (h(n, n) - h(m, m)) * h(n, m);
        }
    }
    return commutator(eta, h);
}

double default_ell_max(const BandedSymmetricMatrix& h, GeneratorKind generator) {
    const std::size_t dim = h.dim();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < dim; ++n) {
        double radius = 0.0;
        for (std::size_t k = 1; k <= h.bandwidth(); ++k) {
            if (n + k < dim) radius += std::abs(h.get(n, n + k));
            if (n >= k) radius += std::abs(h.get(n - k, n));
        }
        lo = std::min(lo, h.get(n, n) - radius);
        hi = std::max(hi, h.get(n, n) + radius);
    }
    const double n = static_cast<double>(dim);
    const double spread = hi - lo;
    if (!(spread > 0.0)) {
        return 1.0;
    }
    if (generator == GeneratorKind::Wegner) {
        const double gap = spread / (n * n);
        return 50.0 / (gap * gap);
    }
    // Mean spacing / N^2: random banded ensembles do produce pairs far below
    // the mean spacing / N, and an unconverged Mielke step is cheap.
    return 50.0 / (spread / (n * n * n));
}

FlowResult integrate_flow(const BandedSymmetricMatrix& h0, const FlowConfig& config) {
    config.validate();
    if (h0.dim() == 0) {
        throw InputError("integrate_flow: empty matrix");
    }
    BandedSymmetricMatrix working = h0;
    if (config.generator == GeneratorKind::Wegner) {
        if (h0.dim() > kWegnerMaxDim) {
            throw InputError("Wegner generator runs dense and is limited to N <= " +
                             std::to_string(kWegnerMaxDim));
        }
        working = h0.widened(h0.dim() - 1);
    }
    const double ell_max = config.ell_max.value_or(default_ell_max(h0, config.generator));

    FlowResult result;
    result.blocks = split_irreducible(working);
    result.final = working;
    result.converged = true;

    std::vector<BlockFlow> flows;
    flows.reserve(result.blocks.size());
    for (const auto& block : result.blocks) {
        flows.push_back(flow_block(extract_block(working, block), config, ell_max));
    }

    double frob0_total = 0.0;
    double frob_drift_total = 0.0;
    for (std::size_t b = 0; b < flows.size(); ++b) {
        const BlockFlow& f = flows[b];
        insert_block(result.final, f.final, result.blocks[b]);
        result.ell_final = std::max(result.ell_final, f.ell_final);
        result.converged = result.converged && f.converged;
        result.steps += f.steps;
        result.diagnostics.trace_drift += f.trace_drift;
        result.diagnostics.partial_trace_violation =
            std::max(result.diagnostics.partial_trace_violation, f.partial_violation);
        frob0_total += f.frob0;
        frob_drift_total += f.frob_drift_abs;
    }
    result.diagnostics.frobenius_drift = frob0_total > 0.0 ? frob_drift_total / frob0_total : 0.0;

    for (std::size_t s = 0; s < config.snapshot_ells.size(); ++s) {
        const double ell = config.snapshot_ells[s];
        if (ell > result.ell_final) {
            break;
        }
        Snapshot snap{ell, working};
        for (std::size_t b = 0; b < flows.size(); ++b) {
            const BlockFlow& f = flows[b];
            const BandedSymmetricMatrix& state = s < f.snapshots.size() ? f.snapshots[s].matrix : f.final;
            insert_block(snap.matrix, state, result.blocks[b]);
        }
        result.snapshots.push_back(std::move(snap));
    }

    if (config.record_steps) {
        // Merge the per-block step sequences on a common l axis; each block
        // holds its latest accepted state.
        std::vector<std::size_t> cursor(flows.size(), 0);
        while (true) {
            double next = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < flows.size(); ++b) {
                if (cursor[b] < flows[b].rows.size()) {
                    next = std::min(next, flows[b].rows[cursor[b]].ell);
                }
            }
            if (!std::isfinite(next)) {
                break;
            }
            TraceRow row;
            row.ell = next;
            row.diagonal.assign(working.dim(), 0.0);
            for (std::size_t b = 0; b < flows.size(); ++b) {
                auto& rows = flows[b].rows;
                while (cursor[b] < rows.size() && rows[cursor[b]].ell <= next) {
                    ++cursor[b];
                }
                const TraceRow& held = rows[cursor[b] - 1];
                row.trace += held.trace;
                row.frob_sq += held.frob_sq;
                row.offdiag_sq += held.offdiag_sq;
                std::copy(held.diagonal.begin(), held.diagonal.end(),
                          row.diagonal.begin() + static_cast<std::ptrdiff_t>(result.blocks[b].start));
            }
            result.trace.push_back(std::move(row));
        }
    }
    return result;
}

double decay_rate_estimate(std::span<const Snapshot> snapshots, std::size_t n, std::size_t m) {
    if (n == m) {
        throw InputError("decay_rate_estimate: needs an off-diagonal entry (n != m)");
    }
    std::vector<double> ells;
    std::vector<double> logs;
    for (const auto& snap : snapshots) {
        const double value = std::abs(snap.matrix.get(n, m));
        const double floor = 1e-12 * std::sqrt(frobenius_norm_sq(snap.matrix));
        if (value >= floor && value > 0.0) {
            ells.push_back(snap.ell);
            logs.push_back(std::log(value));
        }
    }
    if (ells.size() < 3) {
        throw InputError("decay_rate_estimate: fewer than three snapshots with |h(" +
                         std::to_string(n) + "," + std::to_string(m) +
                         ")| above the 1e-12 ‖H‖ floor; take snapshots at smaller l");
    }
    const std::size_t count = std::max<std::size_t>(3, ells.size() / 2);
    const std::size_t first = ells.size() - count;
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = first; i < ells.size(); ++i) {
        mean_x += ells[i];
        mean_y += logs[i];
    }
    mean_x /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = first; i < ells.size(); ++i) {
        sxy += (ells[i] - mean_x) * (logs[i] - mean_y);
        sxx += (ells[i] - mean_x) * (ells[i] - mean_x);
    }
    if (!(sxx > 0.0)) {
        throw InputError("decay_rate_estimate: snapshots must span distinct l values");
    }
    const double rate = -sxy / sxx;
    if (!(rate > 0.0)) {
        throw InputError("decay_rate_estimate: h(" + std::to_string(n) + "," + std::to_string(m) +
                         ") is not decaying over the late window");
    }
    return rate;
}

} // namespace bandflow
