#include "bandflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandflow/errors.hpp"

namespace bandflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Fourth-order weights; error = fifth - fourth.
constexpr double bs1 = 5179.0 / 57600.0, bs3 = 7571.0 / 16695.0, bs4 = 393.0 / 640.0,
                 bs5 = -92097.0 / 339200.0, bs6 = 187.0 / 2100.0, bs7 = 1.0 / 40.0;
constexpr double e1 = b1 - bs1, e3 = b3 - bs3, e4 = b4 - bs4, e5 = b5 - bs5, e6 = b6 - bs6,
                 e7 = -bs7;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinShrink = 0.2;  // h_new >= 0.2 h
constexpr double kMaxGrow = 10.0;   // h_new <= 10 h

} // namespace

DormandPrince::DormandPrince(Rhs rhs, std::vector<double> y0, double t0, StepControl control)
    : rhs_(std::move(rhs)), control_(control), t_(t0), y_(std::move(y0)) {
    if (!(control_.rel_tol > 0.0) || !(control_.abs_tol > 0.0)) {
        throw InputError("integrator tolerances must be positive");
    }
    const std::size_t n = y_.size();
    y_new_.resize(n);
    stage_.resize(n);
    err_.resize(n);
    k_.assign(7, std::vector<double>(n, 0.0));
    rhs_(t_, y_, k_[0]);
    h_ = initial_step();
}

double DormandPrince::error_norm(std::span<const double> err, std::span<const double> y_new) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale =
            control_.abs_tol + control_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

double DormandPrince::initial_step() const {
    const std::size_t n = y_.size();
    if (n == 0) {
        return 1.0;
    }
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = control_.abs_tol + control_.rel_tol * std::abs(y_[i]);
        d0 = std::max(d0, std::abs(y_[i]) / sc);
        d1 = std::max(d1, std::abs(k_[0][i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    if (control_.max_step > 0.0) {
        h0 = std::min(h0, control_.max_step);
    }
    std::vector<double> y1(n);
    std::vector<double> f1(n);
    for (std::size_t i = 0; i < n; ++i) {
        y1[i] = y_[i] + h0 * k_[0][i];
    }
    rhs_(t_ + h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = control_.abs_tol + control_.rel_tol * std::abs(y_[i]);
        d2 = std::max(d2, std::abs(f1[i] - k_[0][i]) / sc);
    }
    d2 /= h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    double h = std::min(100.0 * h0, h1);
    if (control_.max_step > 0.0) {
        h = std::min(h, control_.max_step);
    }
    return h;
}

void DormandPrince::step(double t_limit) {
    const std::size_t n = y_.size();
    if (t_limit <= t_) {
        return;
    }
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    bool last_rejected = false;
    for (;;) {
        double h = h_;
        if (control_.max_step > 0.0) {
            h = std::min(h, control_.max_step);
        }
        bool hits_limit = false;
        if (t_ + h >= t_limit || t_ + 1.01 * h >= t_limit) {
            h = t_limit - t_;
            hits_limit = true;
        }
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
        if (h < min_step) {
            throw StepSizeUnderflow(t_, h, "step size underflow at t = " + std::to_string(t_));
        }

        for (std::size_t i = 0; i < n; ++i) stage_[i] = y_[i] + h * a21 * k1[i];
        rhs_(t_ + c2 * h, stage_, k2);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs_(t_ + c3 * h, stage_, k3);
        for (std::size_t i = 0; i < n; ++i)
            stage_[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs_(t_ + c4 * h, stage_, k4);
        for (std::size_t i = 0; i < n; ++i)
            stage_[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs_(t_ + c5 * h, stage_, k5);
        for (std::size_t i = 0; i < n; ++i)
            stage_[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_new = hits_limit ? t_limit : t_ + h;
        rhs_(t_new, stage_, k6);
        for (std::size_t i = 0; i < n; ++i)
            y_new_[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs_(t_new, y_new_, k7);
        for (std::size_t i = 0; i < n; ++i)
            err_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        const double err = error_norm(err_, y_new_);
        if (!std::isfinite(err)) {
            h_ = h * kMinShrink;
            ++rejected_;
            last_rejected = true;
            continue;
        }
        const double fac11 = std::pow(std::max(err, 1e-300), kExpo);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(fac_old_, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
            double h_next = h / fac;
            if (last_rejected) {
                h_next = std::min(h_next, h);
            }
            fac_old_ = std::max(err, 1e-4);
            y_.swap(y_new_);
            k1.swap(k7);
            // Decaying components otherwise drift through the subnormal range,
            // where arithmetic is many times slower. abs_tol > 0 dwarfs them.
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(y_[i]) < std::numeric_limits<double>::min()) y_[i] = 0.0;
                if (std::abs(k1[i]) < std::numeric_limits<double>::min()) k1[i] = 0.0;
            }
            t_ = t_new;
            // A step shortened to land on t_limit says little about the next one.
            h_ = hits_limit ? std::max(h_next, h_) : h_next;
            ++accepted_;
            return;
        }
        h_ = h / std::min(1.0 / kMinShrink, fac11 / kSafety);
        ++rejected_;
        last_rejected = true;
    }
}

void DormandPrince::advance_to(double t_end) {
    while (t_ < t_end) {
        step(t_end);
    }
}

} // namespace bandflow
