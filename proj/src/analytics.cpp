#include "bandflow/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bandflow/bessel.hpp"
#include "bandflow/errors.hpp"
#include "bandflow/text_io.hpp"

namespace bandflow {

namespace {

double rpa_radicand(const LipkinParams& params) {
    params.validate();
    const double j = params.j();
    const double coupling = 4.0 * j * params.v0;
    if (!(coupling < params.xi0)) {
        throw DomainError("the RPA solution requires 4 J V0 < xi0 (4 J V0 = " + format_double(coupling) +
                          ", xi0 = " + format_double(params.xi0) + ")");
    }
    return 4.0 * params.xi0 * params.xi0 - 64.0 * params.v0 * params.v0 * j * j;
}

double parity_sign(std::size_t n) { return n % 2 == 0 ? 1.0 : -1.0; }

double z_of(std::size_t n, const SpinBosonParams& params) {
    return 2.0 * params.lambda * std::sqrt(static_cast<double>(n)) / params.omega;
}

} // namespace

double lipkin_rpa_spectrum(const LipkinParams& params, std::size_t n, LipkinBlock block) {
    const double slope = std::sqrt(rpa_radicand(params));
    const double quarter = block == LipkinBlock::A ? -0.25 : 0.25;
    return slope * (static_cast<double>(n) + 0.5 + quarter) - (params.j() + 0.5) * params.xi0;
}

double lipkin_rpa_gap(const LipkinParams& params) { return 0.5 * std::sqrt(rpa_radicand(params)); }

double lipkin_rpa_slope(const LipkinParams& params) { return std::sqrt(rpa_radicand(params)); }

double spinboson_fnx(std::size_t n, double x, const SpinBosonParams& params) {
    params.validate();
    if (n == 0) {
        throw InputError("the Bessel-form solution needs n >= 1");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InputError("x must lie in [0, 1]");
    }
    if (params.lambda == 0.0) {
        return 1.0;
    }
    const double z0 = z_of(n, params);
    if (x == 1.0) {
        return bessel_j0(z0);
    }
    const double root = std::sqrt(1.0 - x);
    const double pref = std::numbers::pi * (params.lambda / params.omega) * std::sqrt(static_cast<double>(n));
    const double a = pref * bessel_y0(z0);
    const double b = -pref * bessel_j0(z0);
    const double z = z0 * root;
    return root * (a * bessel_j1(z) + b * bessel_y1(z));
}

AsymptoticEigenvalue spinboson_eps_asym(std::size_t n, const SpinBosonParams& params,
                                        AsymptoticFormula formula) {
    params.validate();
    if (n == 0) {
        throw InputError("the asymptotic eigenvalue needs n >= 1");
    }
    const double w = params.omega;
    const double lam = params.lambda;
    const double nd = static_cast<double>(n);
    const double z0 = z_of(n, params);
    double shape = 0.0;
    if (formula == AsymptoticFormula::Bessel) {
        shape = bessel_j0(z0);
    } else {
        if (lam == 0.0) {
            throw InputError("the cosine form is undefined at lambda = 0");
        }
        shape = std::pow(nd, -0.25) * std::sqrt(w / (std::numbers::pi * lam)) *
                std::cos(z0 - 0.25 * std::numbers::pi);
    }
    AsymptoticEigenvalue out;
    out.n = n;
    out.formula = formula;
    out.value = nd * w - lam * lam / (4.0 * w) +
                sign_of(params.branch) * parity_sign(n) * 0.5 * params.delta * shape;
    out.cond_f = lam / (w * std::sqrt(nd));
    out.cond_order = (params.delta / (2.0 * w)) * std::sqrt(lam / (std::numbers::pi * w)) * std::pow(nd, -0.75);
    return out;
}

bool is_valid(const AsymptoticEigenvalue& e, const ValidityThresholds& thresholds) {
    return e.cond_f < thresholds.cond_f && e.cond_order < thresholds.cond_order;
}

OrderingCheck ordering_bound_check(std::size_t n, const SpinBosonParams& params) {
    params.validate();
    if (n == 0) {
        throw InputError("the ordering bound needs n >= 1");
    }
    const double spread = 0.5 * params.delta *
                          std::abs(bessel_j0(z_of(n, params)) - bessel_j0(z_of(n + 1, params)));
    const double margin = params.omega - spread;
    return {margin > 0.0, margin};
}

} // namespace bandflow
