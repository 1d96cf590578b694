#include "reservoir/training.hpp"

#include "reservoir/kernels.hpp"

#include <cmath>
#include <string>

namespace reservoir {

double TargetFunction::operator()(std::size_t step) const {
    if (kind == TargetKind::FixedPoint) return amplitude;
    return amplitude * std::sin(omega * static_cast<double>(step) * time_scale);
}

std::string_view to_string(TargetKind kind) {
    return kind == TargetKind::FixedPoint ? "fixed-point" : "sinusoid";
}

TargetKind parse_target_kind(std::string_view text) {
    if (text == "fixed-point") return TargetKind::FixedPoint;
    if (text == "sinusoid") return TargetKind::Sinusoid;
    throw ConfigError("unknown target kind '" + std::string(text) + "'");
}

Vector lsq_fixed_point_update(const Vector& w_out, const Vector& r, double a) {
    require_same_size(w_out.size(), r.size(), "least-squares update");
    const double norm2 = r.squaredNorm();
    if (!(norm2 >= 1e-12)) {
        throw DegenerateRateError("rate vector is (nearly) zero, |r|^2 = " + std::to_string(norm2));
    }
    const double residual = a - w_out.dot(r);
    return w_out + (residual / norm2) * r;
}

TrainerState force_init(std::size_t n, double alpha) {
    if (n == 0) throw ParameterError("trainer size must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("RLS alpha must be positive");
    const auto dim = static_cast<Eigen::Index>(n);
    TrainerState t;
    t.p = Matrix::Identity(dim, dim) / alpha;
    t.w_out = Vector::Zero(dim);
    t.last_w_out = Vector::Zero(dim);
    t.alpha = alpha;
    return t;
}

double force_update(TrainerState& trainer, const Vector& r, double target) {
    require_same_size(trainer.w_out.size(), r.size(), "FORCE update");
    if (!r.allFinite() || !std::isfinite(target)) {
        throw DivergenceError(trainer.updates, "non-finite rate or target passed to FORCE update");
    }
    Vector k;
    kernels::matvec(trainer.p, r, k);
    const double c = 1.0 / (1.0 + r.dot(k));
    const double error = trainer.w_out.dot(r) - target;
    if (!std::isfinite(c) || !std::isfinite(error) || !k.allFinite()) {
        throw DivergenceError(trainer.updates, "non-finite intermediate in FORCE update");
    }
    kernels::rank_one_downdate(trainer.p, k, c);
    trainer.last_w_out = trainer.w_out;
    trainer.w_out -= (c * error) * k;
    ++trainer.updates;
    return error;
}

double max_weight_delta(const Vector& w_out, const Vector& last_w_out) {
    require_same_size(w_out.size(), last_w_out.size(), "weight delta");
    if (w_out.size() == 0) return 0.0;
    return (w_out - last_w_out).cwiseAbs().maxCoeff();
}

bool check_converged(const Vector& w_out, const Vector& last_w_out, std::size_t step,
                     const StoppingCriteria& criteria) {
    if (step >= criteria.max_steps) return true;
    return max_weight_delta(w_out, last_w_out) <= criteria.weight_delta_tol;
}

bool check_converged(const TrainerState& trainer, std::size_t step, const StoppingCriteria& criteria) {
    return check_converged(trainer.w_out, trainer.last_w_out, step, criteria);
}

}  // namespace reservoir
