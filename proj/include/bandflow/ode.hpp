#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bandflow {

/// Local error control: each component's error estimate must stay below
/// abs_tol + rel_tol * max(|y_old|, |y_new|) for a step to be accepted.
struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  ///< 0 = unlimited
};

/// Embedded Runge-Kutta 5(4) pair (Dormand-Prince) with PI step-size control
/// and first-same-as-last reuse of the final stage.
class DormandPrince {
public:
    using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

    DormandPrince(Rhs rhs, std::vector<double> y0, double t0, StepControl control);

    /// Takes one accepted step, never stepping past t_limit. Rejected trial
    /// steps are retried internally. Throws StepSizeUnderflow when the step
    /// shrinks below roundoff relative to t.
    void step(double t_limit);

    /// Steps until t == t_end exactly.
    void advance_to(double t_end);

    double t() const noexcept { return t_; }
    double step_size() const noexcept { return h_; }
    std::span<const double> y() const noexcept { return y_; }
    std::span<const double> dydt() const noexcept { return k_[0]; }
    std::size_t accepted_steps() const noexcept { return accepted_; }
    std::size_t rejected_steps() const noexcept { return rejected_; }

private:
    double error_norm(std::span<const double> err, std::span<const double> y_new) const;
    double initial_step() const;

    Rhs rhs_;
    StepControl control_;
    double t_;
    double h_ = 0.0;
    double fac_old_ = 1e-4;
    std::vector<double> y_;
    std::vector<double> y_new_;
    std::vector<double> stage_;
    std::vector<double> err_;
    std::vector<std::vector<double>> k_;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

} // namespace bandflow
