#pragma once

#include <cstddef>
#include <vector>

#include "bandflow/banded_matrix.hpp"
#include "bandflow/ode.hpp"

namespace bandflow {

// ---------------------------------------------------------------------------
// Lipkin model, pseudo-spin form  H = xi0 Jz + V0 (J+^2 + J-^2)
// ---------------------------------------------------------------------------

struct LipkinParams {
    double xi0 = 1.0;
    double v0 = 0.0;
    int two_j = 2;  ///< 2J, so half-integer J is exact

    double j() const noexcept { return 0.5 * two_j; }
    void validate() const;
};

/// The two parity sectors of Jz: A holds m = -J + 2n, B holds m = -J + 2n + 1.
enum class LipkinBlock { A, B };

struct LipkinBlocks {
    BandedSymmetricMatrix a;
    BandedSymmetricMatrix b;
};

/// Dimension of a parity block: for 2J even A has J+1 states and B has J;
/// for 2J odd both have J + 1/2.
std::size_t lipkin_block_dim(const LipkinParams& params, LipkinBlock block);

BandedSymmetricMatrix build_lipkin_block(const LipkinParams& params, LipkinBlock block);
LipkinBlocks build_lipkin_blocks(const LipkinParams& params);

/// Large-J reduction: eps_n(l) = a(l) n + b(l), delta_n(l) = f(l) delta_n(0).
struct LipkinReducedState {
    double a = 0.0;
    double b = 0.0;
    double f = 1.0;
};

/// a(0) = 2 xi0, b(0) = eps_0(0) of the block, f(0) = 1.
LipkinReducedState lipkin_reduced_initial(const LipkinParams& params, LipkinBlock block);

/// (da, db, df) with df = -a f, da = -64 V0^2 J^2 f^2 and db = c da, where
/// c = 1/4 for block A and 3/4 for block B.
LipkinReducedState lipkin_reduced_rhs(const LipkinReducedState& state, const LipkinParams& params,
                                      LipkinBlock block);

/// a^2 - 64 V0^2 J^2 f^2, conserved by the reduced flow.
double lipkin_reduced_invariant(const LipkinReducedState& state, const LipkinParams& params);

struct LipkinReducedTrajectory {
    std::vector<double> ell;
    std::vector<LipkinReducedState> states;
};

/// Integrates the reduced system to ell_end, keeping every accepted step.
LipkinReducedTrajectory integrate_lipkin_reduced(const LipkinParams& params, LipkinBlock block,
                                                 double ell_end, StepControl control = {1e-12, 1e-14, 0.0});

// ---------------------------------------------------------------------------
// Spin-boson model  H = -(Delta/2) sigma_x + (lambda/2) sigma_z (b + b+) + omega b+ b
// ---------------------------------------------------------------------------

/// Selects eps_n(0) = n omega + s (-1)^n Delta/2 with s = +1 or -1.
enum class Branch : int { Plus = 1, Minus = -1 };

inline double sign_of(Branch b) noexcept { return b == Branch::Plus ? 1.0 : -1.0; }

struct SpinBosonParams {
    double delta = 0.0;
    double lambda = 0.0;
    double omega = 1.0;
    Branch branch = Branch::Plus;
    std::size_t n_trunc = 64;

    void validate() const;
};

/// Tridiagonal truncation: eps_n(0) = n omega + s (-1)^n Delta/2,
/// delta_n(0) = (lambda/2) sqrt(n+1), n = 0..n_trunc-1.
BandedSymmetricMatrix build_spinboson(const SpinBosonParams& params);

/// max(4 n_target, n_target + ceil(40 lambda/omega) + 20).
std::size_t default_truncation(const SpinBosonParams& params, std::size_t n_target);

/// Largest change of the lowest `levels` eigenvalues when n_trunc doubles.
double truncation_change(const SpinBosonParams& params, std::size_t levels);

/// Starting from n_trunc (or the default when n_trunc < default), doubles the
/// truncation until levels 0..n_target move by less than tol * omega under a
/// further doubling. Throws TruncationError beyond max_dim.
std::size_t certify_truncation(const SpinBosonParams& params, std::size_t n_target,
                               double tol = 1e-8, std::size_t max_dim = 1u << 15);

struct DeltaZeroFlow {
    double eps;
    double delta;
};

/// Closed-form flow at Delta = 0: eps_n = n omega + eps_0(l),
/// eps_0(l) = -(lambda^2/4 omega)(1 - exp(-2 omega l)),
/// delta_n = (lambda/2) sqrt(n+1) exp(-omega l). Rejects Delta != 0.
DeltaZeroFlow spinboson_delta0_flow(std::size_t n, double ell, const SpinBosonParams& params);

/// Deviation functions of the spin-boson flow in x = 1 - exp(-2 omega l):
///   eps_n = n omega - (lambda^2/4 omega) x + s (-1)^n (Delta/2) f_n
///   delta_n^2 = (lambda^2/4)(n+1)(1-x) + s (-1)^n (Delta/2) g_n
/// for the levels n_lo .. n_lo + f.size() - 1.
struct SpinBosonReducedState {
    std::size_t n_lo = 0;
    std::vector<double> f;
    std::vector<double> g;
};

/// Largest x accepted by spinboson_reduced_rhs (the coordinate is singular at 1).
inline constexpr double kSpinBosonMaxX = 1.0 - 1e-9;

/// d/dx of (f_n, g_n):
///   omega (1-x) f_n' = -g_n - g_{n-1}
///   2 omega (1-x) g_n' = (lambda^2/2)(n+1)(1-x) S_n - 2 omega g_n + s Delta (-1)^n g_n S_n
/// with S_n = f_{n+1} + f_n. Window edges: g_{-1} = 0 at n = 0, otherwise
/// g_{n_lo-1} = g_{n_lo+1} (same parity); f_{n_hi+1} = f_{n_hi}.
SpinBosonReducedState spinboson_reduced_rhs(double x, const SpinBosonReducedState& state,
                                            const SpinBosonParams& params);

struct SpinBosonReducedSolution {
    std::size_t n_lo = 0;
    std::vector<double> x;                 ///< requested sample points
    std::vector<std::vector<double>> f;    ///< f[sample][level - n_lo]
    std::vector<double> f_at_one;          ///< per level, extrapolated to x = 1
};

/// Integrates levels max(0, n - half_width) .. n + half_width from x = 0
/// (f = 1, g = 0) to x = 1 - 1e-8, sampling f at the requested x values
/// (ascending, each < 1 - 1e-8). f(1) is extrapolated linearly in (1-x)
/// from the end point.
SpinBosonReducedSolution integrate_spinboson_reduced(const SpinBosonParams& params, std::size_t n,
                                                     std::size_t half_width,
                                                     std::vector<double> x_samples,
                                                     StepControl control = {1e-11, 1e-13, 0.0});

} // namespace bandflow
