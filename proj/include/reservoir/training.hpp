#pragma once

// Online readout training: exact-fit least squares for constant targets and
// recursive least squares (FORCE) for time-varying targets.

#include "reservoir/types.hpp"

#include <numbers>
#include <string_view>

namespace reservoir {

enum class TargetKind { FixedPoint, Sinusoid };

struct TargetFunction {
    TargetKind kind = TargetKind::FixedPoint;
    double amplitude = 1.5;
    double omega = 20.0 * std::numbers::pi;
    double time_scale = 0.001;

    static TargetFunction fixed_point(double a) { return {TargetKind::FixedPoint, a, 0.0, 0.0}; }
    static TargetFunction sinusoid(double omega, double time_scale, double amplitude = 1.0) {
        return {TargetKind::Sinusoid, amplitude, omega, time_scale};
    }

    /// f(step) = A for FixedPoint, A sin(omega * step * time_scale) for Sinusoid.
    double operator()(std::size_t step) const;
};

std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view text);

struct StoppingCriteria {
    std::size_t max_steps = 800;
    double weight_delta_tol = 1e-5;
};

struct TrainerState {
    Matrix p;
    Vector w_out;
    Vector last_w_out;
    double alpha = 1.0;
    std::size_t updates = 0;
};

/// Minimum-norm correction making w_out' . r == a exactly.
/// Throws DegenerateRateError when r . r < 1e-12.
Vector lsq_fixed_point_update(const Vector& w_out, const Vector& r, double a);

/// P = I / alpha, zero readout.
TrainerState force_init(std::size_t n, double alpha);

/// One recursive-least-squares step:
///   k = P r, c = 1 / (1 + r . k), P -= c k k^T,
///   e = w_out . r - target, w_out -= c e k.
/// Returns the pre-update error e.
double force_update(TrainerState& trainer, const Vector& r, double target);

/// max_i |w_out_i - last_w_out_i|
double max_weight_delta(const Vector& w_out, const Vector& last_w_out);

/// step >= max_steps, or the last update moved no weight by more than the tolerance.
bool check_converged(const Vector& w_out, const Vector& last_w_out, std::size_t step,
                     const StoppingCriteria& criteria);
bool check_converged(const TrainerState& trainer, std::size_t step, const StoppingCriteria& criteria);

}  // namespace reservoir
