#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bandflow {

/// Invalid user input or a violated precondition (bad index, non-finite value,
/// malformed file). Maps to CLI exit status 3.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parse failure in one of the text formats; carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A closed-form expression was evaluated outside the parameter range where it exists.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The adaptive integrator could not make progress (step size underflow).
class StepSizeUnderflow : public std::runtime_error {
public:
    StepSizeUnderflow(double t, double step, const std::string& what)
        : std::runtime_error(what), t_(t), step_(step) {}

    double t() const noexcept { return t_; }
    double step() const noexcept { return step_; }

private:
    double t_;
    double step_;
};

/// Flow integration failed; carries the flow parameter and the norms at failure.
class FlowError : public std::runtime_error {
public:
    FlowError(double ell, double frob_sq, double offdiag_sq, const std::string& what)
        : std::runtime_error(what), ell_(ell), frob_sq_(frob_sq), offdiag_sq_(offdiag_sq) {}

    double ell() const noexcept { return ell_; }
    double frobenius_norm_sq() const noexcept { return frob_sq_; }
    double offdiag_norm_sq() const noexcept { return offdiag_sq_; }

private:
    double ell_;
    double frob_sq_;
    double offdiag_sq_;
};

/// Fock-space truncation could not be certified within the allowed dimension.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bandflow
