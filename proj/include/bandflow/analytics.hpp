#pragma once

#include <cstddef>

#include "bandflow/models.hpp"

namespace bandflow {

// Lipkin model, harmonic (RPA) approximation. All three throw DomainError
// unless 4 J V0 < xi0.

/// sqrt(4 xi0^2 - 64 V0^2 J^2) (n + 1/2 -+ 1/4) - (J + 1/2) xi0, with -1/4 for
/// block A and +1/4 for block B.
double lipkin_rpa_spectrum(const LipkinParams& params, std::size_t n, LipkinBlock block);

/// sqrt(xi0^2 - 16 V0^2 J^2), the distance from the ground state to the first excited state.
double lipkin_rpa_gap(const LipkinParams& params);

/// sqrt(4 xi0^2 - 64 V0^2 J^2), the large-l limit of the reduced slope a.
double lipkin_rpa_slope(const LipkinParams& params);

// Spin-boson model, large-n solution of the reduced flow.

/// f_n(x) = sqrt(1-x) [a J1(z) + b Y1(z)], z = z0 sqrt(1-x), z0 = 2 lambda sqrt(n)/omega,
/// a = pi (lambda/omega) sqrt(n) Y0(z0), b = -pi (lambda/omega) sqrt(n) J0(z0).
/// At x = 1 the limit J0(z0) is returned. Requires n >= 1, 0 <= x <= 1.
double spinboson_fnx(std::size_t n, double x, const SpinBosonParams& params);

enum class AsymptoticFormula { Bessel, Cosine };

struct AsymptoticEigenvalue {
    std::size_t n = 0;
    double value = 0.0;
    AsymptoticFormula formula = AsymptoticFormula::Bessel;
    double cond_f = 0.0;      ///< lambda / (omega sqrt(n))
    double cond_order = 0.0;  ///< (Delta/2 omega) sqrt(lambda/(pi omega)) n^(-3/4)
};

/// Bessel:  n omega - lambda^2/(4 omega) + s (-1)^n (Delta/2) J0(2 lambda sqrt(n)/omega)
/// Cosine:  the same with J0(z) replaced by its leading large-z form
///          sqrt(2/(pi z)) cos(z - pi/4); undefined at lambda = 0.
/// s is the branch sign, chosen so that lambda = 0 gives the exact diagonal.
AsymptoticEigenvalue spinboson_eps_asym(std::size_t n, const SpinBosonParams& params,
                                        AsymptoticFormula formula);

struct ValidityThresholds {
    double cond_f = 0.5;
    double cond_order = 0.1;
};

bool is_valid(const AsymptoticEigenvalue& e, const ValidityThresholds& thresholds = {});

struct OrderingCheck {
    bool holds = true;
    double margin = 0.0;  ///< omega - (Delta/2) |J0(z_n) - J0(z_{n+1})|
};

/// Whether levels n and n+1 keep their unperturbed order under the asymptotic formula.
OrderingCheck ordering_bound_check(std::size_t n, const SpinBosonParams& params);

} // namespace bandflow
