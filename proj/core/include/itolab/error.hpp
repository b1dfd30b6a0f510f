#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace itolab {

// Bad input: violated precondition, dimension mismatch, point outside a domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of the numerics themselves (as opposed to bad input).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state component became non-finite while stepping an SDE.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t step, double time, std::uint64_t stream_id = 0);

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    std::size_t step_;
    double time_;
    std::uint64_t stream_id_;
};

// Picard iteration hit max_iter before the sup-norm update fell below tol.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(std::size_t iterations, double last_difference, double last_ratio);

    std::size_t iterations() const noexcept { return iterations_; }
    double last_difference() const noexcept { return last_difference_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    std::size_t iterations_;
    double last_difference_;
    double last_ratio_;
};

// Log-log fit asked to take log(0).
class DegenerateFitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Too many exit-time paths reached t_cap, or too many Monte Carlo paths diverged.
class ExitCapError : public NumericalError {
public:
    ExitCapError(double fraction, std::size_t count, std::size_t total);

    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

} // namespace itolab
