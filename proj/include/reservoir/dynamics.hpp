#pragma once

// Reservoir construction and time stepping.
//
// The rate network follows dx/dt = -x + W r + w_fb z with r = tanh(x) and a
// linear readout z = w_out . r. The input pathway w_in is stored but never
// driven (u == 0), so it does not appear in the update.
//
// Time is indexed by integration step. In the unrolled modes the feedback
// applied on the step that leaves state t is the readout of an earlier
// "unroll state" u(t):
//
//   ClosedLoop        u(t) = t                  (feedback from the current rate)
//   PerStep           u(t) = t - 1              (one-step lag)
//   Integrated(k)     u(t) = k * floor((t-1)/k) (held for k steps)
//
// with u(0) = 0 in every mode. Integrated(1) and PerStep coincide.

#include "reservoir/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace reservoir {

struct ReservoirParams {
    std::size_t n = 1000;
    double g = 1.5;
    double dt = 1.0;
    double init_state_scale = 0.5;
    /// Multiplier on the U(-1, 1) feedback weights.
    double feedback_scale = 1.0;
    std::uint64_t seed = 1;

    /// Throws ParameterError when n == 0, dt <= 0 or g < 0.
    void validate() const;
};

struct WeightSet {
    Matrix w;
    Vector w_fb;
    Vector w_out;
    Vector w_in;

    std::size_t size() const { return static_cast<std::size_t>(w_fb.size()); }
};

struct ReservoirState {
    Vector x;
    Vector r;
    std::size_t step = 0;

    static ReservoirState from_x(Vector x, std::size_t step = 0);
};

enum class UnrollMode { ClosedLoop, PerStep, Integrated };

std::string_view to_string(UnrollMode mode);
UnrollMode parse_unroll_mode(std::string_view text);

struct UnrollSchedule {
    UnrollMode mode = UnrollMode::PerStep;
    std::size_t interval = 1;

    static UnrollSchedule closed_loop() { return {UnrollMode::ClosedLoop, 1}; }
    static UnrollSchedule per_step() { return {UnrollMode::PerStep, 1}; }
    static UnrollSchedule integrated(std::size_t k);

    /// Effective hold length: 1 for PerStep, k for Integrated.
    std::size_t hold() const { return mode == UnrollMode::Integrated ? interval : 1; }
    /// Index of the state whose readout drives the step leaving state `t`.
    std::size_t unroll_state(std::size_t t) const;
    /// True when the step leaving state `t` starts a new hold segment.
    bool refresh_at(std::size_t t) const;
    /// True when state `t` closes an unroll instance (every state for
    /// PerStep/ClosedLoop, multiples of k for Integrated).
    bool is_instance_end(std::size_t t) const;
};

struct FixedPointOptions {
    std::size_t max_iters = 10000;
    double tol = 1e-12;
    double relaxation = 0.5;
};

/// Draws W ~ N(0, g^2/n), w_fb ~ feedback_scale * U(-1, 1), w_in ~ U(-1, 1),
/// x(0) ~ N(0, init_state_scale^2); w_out starts at zero. Each draw uses its
/// own RNG stream derived from the seed.
std::pair<WeightSet, ReservoirState> init_network(const ReservoirParams& params);

/// z = w_out . r
double readout(const WeightSet& weights, const Vector& r);

/// One explicit Euler step with the caller-supplied feedback value.
/// Throws DivergenceError (naming the step) on non-finite input or output.
ReservoirState step(const ReservoirState& state, const WeightSet& weights, double z_fb, double dt);

struct SegmentResult {
    ReservoirState state;
    /// One row of rates per step taken, in order.
    Matrix rates;
};

/// Applies `step` `steps` times with the feedback held at `z_unroll`.
SegmentResult run_unrolled_segment(const ReservoirState& state, const WeightSet& weights, double z_unroll,
                                   std::size_t steps, double dt);

/// Damped iteration x <- (1 - a) x + a (W tanh(x) + w_fb * target) until the
/// sup-norm residual of x = W tanh(x) + w_fb * target is below tol.
/// Throws ConvergenceError carrying the final residual.
Vector solve_fixed_point(const WeightSet& weights, double target, const FixedPointOptions& options = {},
                         const std::optional<Vector>& initial_guess = std::nullopt);

/// Sup-norm of x - (W tanh(x) + w_fb * target).
double fixed_point_residual(const WeightSet& weights, double target, const Vector& x);

/// Drives the network for `steps` steps under `schedule` with frozen w_out.
/// Keeps the full state history (index 0 is `initial`). Used for free runs
/// and the discretization checks.
std::vector<ReservoirState> simulate(const ReservoirState& initial, const WeightSet& weights,
                                     const UnrollSchedule& schedule, std::size_t steps, double dt);

}  // namespace reservoir
