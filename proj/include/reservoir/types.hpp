#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reservoir {

using Vector = Eigen::VectorXd;
/// Row-major so that the row-parallel kernels walk contiguous memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Complex = std::complex<double>;

// Error hierarchy. Everything derives from std::runtime_error or
// std::invalid_argument so callers can catch broadly.

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values appeared in the simulated state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("numerical divergence at step " + std::to_string(step) + ": " + what),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// An iterative solve ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double residual, const std::string& what)
        : std::runtime_error(what + " (final residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct DegenerateRateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenSolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientHistoryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace reservoir
