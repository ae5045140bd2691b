#include "bandflow/bessel.hpp"

#include <cmath>
#include <numbers>

#include "bandflow/errors.hpp"

namespace bandflow {

namespace {

// Below this argument the power series is used. The Hankel expansion's
// smallest term is about exp(-2z), so at 12 it is already under 1e-10 while
// the series cancellation costs at most a few thousand ulps.
constexpr double kSeriesLimit = 12.0;

constexpr double kPi = std::numbers::pi;
constexpr double kGamma = std::numbers::egamma;

struct Pair {
    double j;
    double y;
};

// Order 0 and 1 together: J and Y share the terms of the series.
Pair series0(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;  // (-q)^k / (k!)^2
    double j = 1.0;
    double harmonic = 0.0;
    double tail = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        j += term;
        tail -= harmonic * term;
        if (std::abs(term) * (1.0 + harmonic) < 1e-18 * std::abs(j) + 1e-300) {
            break;
        }
    }
    const double y = (2.0 / kPi) * ((std::log(0.5 * z) + kGamma) * j + tail);
    return {j, y};
}

Pair series1(double z) {
    const double q = 0.25 * z * z;
    double term = 0.5 * z;  // (z/2) (-q)^k / (k! (k+1)!)
    double j = term;
    // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
    double h_k = 0.0;
    double h_k1 = 1.0;
    double tail = term * (-2.0 * kGamma + h_k + h_k1);
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * (k + 1));
        h_k += 1.0 / k;
        h_k1 += 1.0 / (k + 1);
        j += term;
        const double piece = term * (-2.0 * kGamma + h_k + h_k1);
        tail += piece;
        if (std::abs(piece) + std::abs(term) < 1e-18 * (std::abs(j) + std::abs(tail)) + 1e-300) {
            break;
        }
    }
    const double y = -2.0 / (kPi * z) + (2.0 / kPi) * std::log(0.5 * z) * j - tail / kPi;
    return {j, y};
}

// Hankel's expansion, truncated before the terms start to grow.
Pair asymptotic(int order, double z) {
    const double mu = 4.0 * order * order;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * z);
        if (std::abs(term) >= last || std::abs(term) < 1e-17) {
            break;
        }
        last = std::abs(term);
        switch (k % 4) {
        case 0: p += term; break;
        case 1: q += term; break;
        case 2: p -= term; break;
        default: q -= term; break;
        }
    }
    const double chi = z - (0.5 * order + 0.25) * kPi;
    const double amp = std::sqrt(2.0 / (kPi * z));
    const double c = std::cos(chi);
    const double s = std::sin(chi);
    return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

} // namespace

double bessel(BesselKind kind, double z) {
    if (!std::isfinite(z) || z < 0.0) {
        throw InputError("bessel argument must be finite and non-negative");
    }
    const bool second_kind = kind == BesselKind::Y0 || kind == BesselKind::Y1;
    if (z == 0.0) {
        if (second_kind) {
            throw InputError("Y0 and Y1 are singular at z = 0");
        }
        return kind == BesselKind::J0 ? 1.0 : 0.0;
    }
    const int order = (kind == BesselKind::J0 || kind == BesselKind::Y0) ? 0 : 1;
    Pair r;
    if (z <= kSeriesLimit) {
        r = order == 0 ? series0(z) : series1(z);
    } else {
        r = asymptotic(order, z);
    }
    return second_kind ? r.y : r.j;
}

} // namespace bandflow
