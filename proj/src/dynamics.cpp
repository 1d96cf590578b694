#include "reservoir/dynamics.hpp"

#include "reservoir/kernels.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace reservoir {

namespace {

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

enum Stream : std::uint32_t { kRecurrent = 1, kFeedback = 2, kInput = 3, kInitialState = 4 };

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

void ReservoirParams::validate() const {
    if (n == 0) throw ParameterError("reservoir size n must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be a positive finite number");
    if (!(g >= 0.0) || !std::isfinite(g)) throw ParameterError("gain g must be nonnegative");
    if (!(init_state_scale >= 0.0)) throw ParameterError("init_state_scale must be nonnegative");
    if (!std::isfinite(feedback_scale)) throw ParameterError("feedback_scale must be finite");
}

ReservoirState ReservoirState::from_x(Vector x, std::size_t step) {
    ReservoirState s;
    s.r = x.array().tanh().matrix();
    s.x = std::move(x);
    s.step = step;
    return s;
}

std::string_view to_string(UnrollMode mode) {
    switch (mode) {
        case UnrollMode::ClosedLoop: return "closed-loop";
        case UnrollMode::PerStep: return "per-step";
        case UnrollMode::Integrated: return "integrated";
    }
    return "unknown";
}

UnrollMode parse_unroll_mode(std::string_view text) {
    if (text == "closed-loop" || text == "closed") return UnrollMode::ClosedLoop;
    if (text == "per-step") return UnrollMode::PerStep;
    if (text == "integrated") return UnrollMode::Integrated;
    throw ConfigError("unknown unroll mode '" + std::string(text) + "'");
}

UnrollSchedule UnrollSchedule::integrated(std::size_t k) {
    if (k == 0) throw ParameterError("unroll interval must be positive");
    return {UnrollMode::Integrated, k};
}

std::size_t UnrollSchedule::unroll_state(std::size_t t) const {
    if (mode == UnrollMode::ClosedLoop || t == 0) return t;
    const std::size_t k = hold();
    return k * ((t - 1) / k);
}

bool UnrollSchedule::refresh_at(std::size_t t) const {
    if (t == 0) return true;
    return (t - 1) % hold() == 0;
}

bool UnrollSchedule::is_instance_end(std::size_t t) const {
    if (mode != UnrollMode::Integrated) return true;
    return t % interval == 0;
}

std::pair<WeightSet, ReservoirState> init_network(const ReservoirParams& params) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(params.n);

    WeightSet weights;
    weights.w.resize(n, n);
    {
        auto rng = stream_engine(params.seed, kRecurrent);
        if (params.g == 0.0) {
            weights.w.setZero();  // normal_distribution rejects a zero stddev
        } else {
            std::normal_distribution<double> normal(0.0, params.g / std::sqrt(static_cast<double>(n)));
            for (Eigen::Index i = 0; i < n * n; ++i) weights.w.data()[i] = normal(rng);
        }
    }
    {
        auto rng = stream_engine(params.seed, kFeedback);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        weights.w_fb.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) weights.w_fb[i] = params.feedback_scale * uniform(rng);
    }
    {
        auto rng = stream_engine(params.seed, kInput);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        weights.w_in.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) weights.w_in[i] = uniform(rng);
    }
    weights.w_out = Vector::Zero(n);

    Vector x(n);
    {
        auto rng = stream_engine(params.seed, kInitialState);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = params.init_state_scale * normal(rng);
    }
    return {std::move(weights), ReservoirState::from_x(std::move(x), 0)};
}

double readout(const WeightSet& weights, const Vector& r) {
    require_same_size(weights.w_out.size(), r.size(), "readout");
    return weights.w_out.dot(r);
}

ReservoirState step(const ReservoirState& state, const WeightSet& weights, double z_fb, double dt) {
    require_same_size(state.x.size(), weights.w_fb.size(), "step state");
    if (!std::isfinite(z_fb)) throw DivergenceError(state.step, "feedback value is not finite");
    if (!all_finite(state.x)) throw DivergenceError(state.step, "state contains non-finite entries");

    ReservoirState next;
    kernels::euler_step(state.x, state.r, weights.w, weights.w_fb, z_fb, dt, next.x);
    next.step = state.step + 1;
    if (!all_finite(next.x)) throw DivergenceError(next.step, "state contains non-finite entries");
    next.r = next.x.array().tanh().matrix();
    return next;
}

SegmentResult run_unrolled_segment(const ReservoirState& state, const WeightSet& weights, double z_unroll,
                                   std::size_t steps, double dt) {
    if (steps == 0) throw ParameterError("segment length must be positive");
    SegmentResult result;
    result.rates.resize(static_cast<Eigen::Index>(steps), state.x.size());
    ReservoirState current = state;
    for (std::size_t s = 0; s < steps; ++s) {
        current = step(current, weights, z_unroll, dt);
        result.rates.row(static_cast<Eigen::Index>(s)) = current.r.transpose();
    }
    result.state = std::move(current);
    return result;
}

double fixed_point_residual(const WeightSet& weights, double target, const Vector& x) {
    require_same_size(x.size(), weights.w_fb.size(), "fixed point residual");
    Vector drive;
    kernels::matvec(weights.w, x.array().tanh().matrix(), drive);
    return (x - drive - weights.w_fb * target).cwiseAbs().maxCoeff();
}

Vector solve_fixed_point(const WeightSet& weights, double target, const FixedPointOptions& options,
                         const std::optional<Vector>& initial_guess) {
    if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) {
        throw ParameterError("fixed point relaxation must lie in (0, 1]");
    }
    if (!(options.tol > 0.0)) throw ParameterError("fixed point tolerance must be positive");
    const Eigen::Index n = weights.w_fb.size();
    Vector x = initial_guess ? *initial_guess : Vector::Zero(n);
    require_same_size(x.size(), n, "fixed point initial guess");

    const double alpha = options.relaxation;
    Vector drive;
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it <= options.max_iters; ++it) {
        kernels::matvec(weights.w, x.array().tanh().matrix(), drive);
        const Vector image = drive + weights.w_fb * target;
        residual = (x - image).cwiseAbs().maxCoeff();
        if (!std::isfinite(residual)) break;
        if (residual <= options.tol) return x;
        if (it == options.max_iters) break;
        x = (1.0 - alpha) * x + alpha * image;
    }
    throw ConvergenceError(residual, "fixed point iteration did not converge after " +
                                         std::to_string(options.max_iters) + " iterations");
}

std::vector<ReservoirState> simulate(const ReservoirState& initial, const WeightSet& weights,
                                     const UnrollSchedule& schedule, std::size_t steps, double dt) {
    std::vector<ReservoirState> history;
    history.reserve(steps + 1);
    history.push_back(initial);
    history.back().step = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double z = readout(weights, history[schedule.unroll_state(t)].r);
        history.push_back(step(history[t], weights, z, dt));
    }
    return history;
}

}  // namespace reservoir
