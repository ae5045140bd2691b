#include "bandflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandflow/errors.hpp"
#include "bandflow/oracle.hpp"

namespace bandflow {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InputError(std::string(name) + " must be finite");
    }
}

int block_shift(LipkinBlock block) { return block == LipkinBlock::A ? 0 : 1; }

} // namespace

void LipkinParams::validate() const {
    require_finite(xi0, "xi0");
    require_finite(v0, "v0");
    if (xi0 <= 0.0) throw InputError("xi0 must be positive");
    if (v0 < 0.0) throw InputError("v0 must be non-negative");
    if (two_j < 1) throw InputError("two_j must be at least 1");
}

std::size_t lipkin_block_dim(const LipkinParams& params, LipkinBlock block) {
    params.validate();
    const auto tj = static_cast<std::size_t>(params.two_j);
    // m = -J + 2n + shift <= J  <=>  2n <= 2J - shift
    return (tj - static_cast<std::size_t>(block_shift(block))) / 2 + 1;
}

BandedSymmetricMatrix build_lipkin_block(const LipkinParams& params, LipkinBlock block) {
    const std::size_t dim = lipkin_block_dim(params, block);
    const long tj = params.two_j;
    const long shift = block_shift(block);
    // Work with doubled quantities so that half-integer J stays exact:
    // 4 J(J+1) = tj (tj + 2) and 4 m(m+1) = tm (tm + 2) with tm = 2m.
    std::vector<double> diag(dim);
    std::vector<double> off(dim > 0 ? dim - 1 : 0);
    for (std::size_t n = 0; n < dim; ++n) {
        const long tm = -tj + 4 * static_cast<long>(n) + 2 * shift;
        diag[n] = params.xi0 * 0.5 * static_cast<double>(tm);
        if (n + 1 < dim) {
            const long jj = tj * (tj + 2);
            const long up1 = jj - tm * (tm + 2);
            const long up2 = jj - (tm + 2) * (tm + 4);
            off[n] = params.v0 * 0.25 * std::sqrt(static_cast<double>(up1)) *
                     std::sqrt(static_cast<double>(up2));
        }
    }
    if (dim == 1) {
        return BandedSymmetricMatrix::diagonal(diag);
    }
    return BandedSymmetricMatrix::tridiagonal(diag, off);
}

LipkinBlocks build_lipkin_blocks(const LipkinParams& params) {
    return {build_lipkin_block(params, LipkinBlock::A), build_lipkin_block(params, LipkinBlock::B)};
}

LipkinReducedState lipkin_reduced_initial(const LipkinParams& params, LipkinBlock block) {
    params.validate();
    const double j = params.j();
    return {2.0 * params.xi0, (-j + block_shift(block)) * params.xi0, 1.0};
}

LipkinReducedState lipkin_reduced_rhs(const LipkinReducedState& state, const LipkinParams& params,
                                      LipkinBlock block) {
    const double j = params.j();
    const double c = block == LipkinBlock::A ? 0.25 : 0.75;
    const double da = -64.0 * params.v0 * params.v0 * j * j * state.f * state.f;
    return {da, c * da, -state.a * state.f};
}

double lipkin_reduced_invariant(const LipkinReducedState& state, const LipkinParams& params) {
    const double j = params.j();
    return state.a * state.a - 64.0 * params.v0 * params.v0 * j * j * state.f * state.f;
}

LipkinReducedTrajectory integrate_lipkin_reduced(const LipkinParams& params, LipkinBlock block,
                                                 double ell_end, StepControl control) {
    if (!(ell_end >= 0.0) || !std::isfinite(ell_end)) {
        throw InputError("ell_end must be finite and non-negative");
    }
    const LipkinReducedState s0 = lipkin_reduced_initial(params, block);
    auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const LipkinReducedState d = lipkin_reduced_rhs({y[0], y[1], y[2]}, params, block);
        dy[0] = d.a;
        dy[1] = d.b;
        dy[2] = d.f;
    };
    DormandPrince ode(rhs, {s0.a, s0.b, s0.f}, 0.0, control);
    LipkinReducedTrajectory out;
    out.ell.push_back(0.0);
    out.states.push_back(s0);
    while (ode.t() < ell_end) {
        ode.step(ell_end);
        const auto y = ode.y();
        out.ell.push_back(ode.t());
        out.states.push_back({y[0], y[1], y[2]});
    }
    return out;
}

void SpinBosonParams::validate() const {
    require_finite(delta, "delta");
    require_finite(lambda, "lambda");
    require_finite(omega, "omega");
    if (delta < 0.0) throw InputError("delta must be non-negative");
    if (lambda < 0.0) throw InputError("lambda must be non-negative");
    if (omega <= 0.0) throw InputError("omega must be positive");
    if (n_trunc < 2) throw InputError("n_trunc must be at least 2");
}

BandedSymmetricMatrix build_spinboson(const SpinBosonParams& params) {
    params.validate();
    const double s = sign_of(params.branch);
    std::vector<double> diag(params.n_trunc);
    std::vector<double> off(params.n_trunc - 1);
    for (std::size_t n = 0; n < params.n_trunc; ++n) {
        const double parity = n % 2 == 0 ? 1.0 : -1.0;
        diag[n] = static_cast<double>(n) * params.omega + s * parity * 0.5 * params.delta;
        if (n + 1 < params.n_trunc) {
            off[n] = 0.5 * params.lambda * std::sqrt(static_cast<double>(n + 1));
        }
    }
    return BandedSymmetricMatrix::tridiagonal(diag, off);
}

std::size_t default_truncation(const SpinBosonParams& params, std::size_t n_target) {
    params.validate();
    const auto reach = static_cast<std::size_t>(std::ceil(40.0 * params.lambda / params.omega));
    return std::max(4 * n_target, n_target + reach + 20);
}

namespace {

std::vector<double> lowest_levels(const SpinBosonParams& params, std::size_t dim, std::size_t count) {
    SpinBosonParams p = params;
    p.n_trunc = dim;
    const BandedSymmetricMatrix h = build_spinboson(p);
    return oracle::eigenvalues_tridiag_lowest(h.band(0), h.band(1), std::min(count, dim)).eigenvalues;
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

} // namespace

double truncation_change(const SpinBosonParams& params, std::size_t levels) {
    params.validate();
    return max_change(lowest_levels(params, params.n_trunc, levels),
                      lowest_levels(params, 2 * params.n_trunc, levels));
}

std::size_t certify_truncation(const SpinBosonParams& params, std::size_t n_target, double tol,
                               std::size_t max_dim) {
    params.validate();
    const std::size_t levels = n_target + 1;
    std::size_t dim = std::max(params.n_trunc, default_truncation(params, n_target));
    std::vector<double> current = lowest_levels(params, dim, levels);
    while (2 * dim <= max_dim) {
        std::vector<double> doubled = lowest_levels(params, 2 * dim, levels);
        if (max_change(current, doubled) < tol * params.omega) {
            return dim;
        }
        dim *= 2;
        current = std::move(doubled);
    }
    throw TruncationError("truncation not certified for level " + std::to_string(n_target) +
                          " up to n_trunc = " + std::to_string(max_dim) +
                          "; pass a larger --n-trunc or reduce lambda/omega");
}

DeltaZeroFlow spinboson_delta0_flow(std::size_t n, double ell, const SpinBosonParams& params) {
    params.validate();
    if (params.delta != 0.0) {
        throw InputError("the closed-form flow requires delta = 0");
    }
    if (!(ell >= 0.0)) {
        throw InputError("ell must be non-negative");
    }
    const double w = params.omega;
    const double lam = params.lambda;
    const double eps0 = -(lam * lam / (4.0 * w)) * -std::expm1(-2.0 * w * ell);
    return {static_cast<double>(n) * w + eps0,
            0.5 * lam * std::sqrt(static_cast<double>(n + 1)) * std::exp(-w * ell)};
}

SpinBosonReducedState spinboson_reduced_rhs(double x, const SpinBosonReducedState& state,
                                            const SpinBosonParams& params) {
    if (!(x >= 0.0) || x > kSpinBosonMaxX) {
        throw InputError("x must lie in [0, 1 - 1e-9]; the coordinate is singular at x = 1");
    }
    const std::size_t count = state.f.size();
    if (count == 0 || state.g.size() != count) {
        throw InputError("f and g must be non-empty and of equal length");
    }
    const double w = params.omega;
    const double lam2 = params.lambda * params.lambda;
    const double s = sign_of(params.branch);
    const double one_minus_x = 1.0 - x;

    double g_below = 0.0;
    if (state.n_lo > 0) {
        g_below = count > 1 ? state.g[1] : state.g[0];
    }

    SpinBosonReducedState d{state.n_lo, std::vector<double>(count), std::vector<double>(count)};
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = state.n_lo + i;
        const double parity = n % 2 == 0 ? 1.0 : -1.0;
        const double g_prev = i == 0 ? g_below : state.g[i - 1];
        const double f_next = i + 1 < count ? state.f[i + 1] : state.f[i];
        const double sum_f = f_next + state.f[i];
        d.f[i] = -(state.g[i] + g_prev) / (w * one_minus_x);
        d.g[i] = (0.5 * lam2 * static_cast<double>(n + 1) * one_minus_x * sum_f -
                  2.0 * w * state.g[i] + s * params.delta * parity * state.g[i] * sum_f) /
                 (2.0 * w * one_minus_x);
    }
    return d;
}

SpinBosonReducedSolution integrate_spinboson_reduced(const SpinBosonParams& params, std::size_t n,
                                                     std::size_t half_width,
                                                     std::vector<double> x_samples,
                                                     StepControl control) {
    params.validate();
    constexpr double x_end = 1.0 - 1e-8;
    for (std::size_t i = 0; i < x_samples.size(); ++i) {
        const double x = x_samples[i];
        if (!(x >= 0.0) || x > x_end || (i > 0 && x < x_samples[i - 1])) {
            throw InputError("x samples must be ascending within [0, 1 - 1e-8]");
        }
    }
    const std::size_t n_lo = n > half_width ? n - half_width : 0;
    const std::size_t count = n + half_width - n_lo + 1;

    // Integrate in t = -ln(1 - x), where d/dt = (1 - x) d/dx removes the
    // coordinate singularity from the right-hand side.
    auto to_t = [](double x) { return -std::log1p(-x); };
    SpinBosonReducedState work{n_lo, std::vector<double>(count), std::vector<double>(count)};
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        const double one_minus_x = std::exp(-t);
        std::copy_n(y.begin(), count, work.f.begin());
        std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(count), count, work.g.begin());
        const SpinBosonReducedState d = spinboson_reduced_rhs(-std::expm1(-t), work, params);
        for (std::size_t i = 0; i < count; ++i) {
            dy[i] = one_minus_x * d.f[i];
            dy[count + i] = one_minus_x * d.g[i];
        }
    };
    std::vector<double> y0(2 * count, 0.0);
    std::fill_n(y0.begin(), count, 1.0);
    DormandPrince ode(rhs, y0, 0.0, control);

    SpinBosonReducedSolution out;
    out.n_lo = n_lo;
    out.x = x_samples;
    for (double x : x_samples) {
        ode.advance_to(to_t(x));
        out.f.emplace_back(ode.y().begin(), ode.y().begin() + static_cast<std::ptrdiff_t>(count));
    }
    const double t_end = to_t(x_end);
    ode.advance_to(t_end);

    // dy/dt = (1 - x) df/dx, so f(1) ~ f(x_end) + (1 - x_end) df/dx = f + dy/dt.
    out.f_at_one.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.f_at_one[i] = ode.y()[i] + ode.dydt()[i];
    }
    return out;
}

} // namespace bandflow
