#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swapforge {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input geometry too degenerate for a closed-form fit (collinear or
/// zero-variance landmarks).
class NumericalDegeneracy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver stopped at max_iter above its tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// A non-finite value appeared during training.
class TrainingDivergence : public std::runtime_error {
public:
    TrainingDivergence(const std::string& what, long step)
        : std::runtime_error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace swapforge
