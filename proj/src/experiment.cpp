#include "reservoir/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace reservoir {

UnrolledRunner::UnrolledRunner(ReservoirState initial, UnrollSchedule schedule, double dt)
    : schedule_(schedule), dt_(dt), current_(std::move(initial)) {
    if (schedule_.hold() == 0) throw ParameterError("unroll interval must be positive");
    previous_ = current_;
    held_ = current_;
}

const ReservoirState& UnrolledRunner::state_at(std::size_t index) const {
    if (index == current_.step) return current_;
    if (index == previous_.step) return previous_;
    if (index == held_.step) return held_;
    throw std::logic_error("unroll state " + std::to_string(index) + " is no longer available at step " +
                           std::to_string(current_.step));
}

const ReservoirState& UnrolledRunner::unroll_source() const {
    return state_at(schedule_.unroll_state(current_.step));
}

void UnrolledRunner::advance(const WeightSet& weights) {
    const std::size_t t = current_.step;
    if (schedule_.refresh_at(t)) {
        held_ = state_at(schedule_.unroll_state(t));
        z_hold_ = readout(weights, held_.r);
    }
    ReservoirState next = step(current_, weights, z_hold_, dt_);
    previous_ = std::move(current_);
    current_ = std::move(next);
}

const SpectrumSnapshot* ExperimentResult::spectrum_at(std::size_t step) const {
    for (const auto& s : spectra) {
        if (s.step == step) return &s;
    }
    return nullptr;
}

double rmse(const std::vector<TracePoint>& trace, Phase phase) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : trace) {
        if (p.phase != phase) continue;
        sum += (p.z - p.target) * (p.z - p.target);
        ++count;
    }
    return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

namespace {

enum class Learner { LeastSquares, Force };

struct TrainedRun {
    ExperimentResult result;
    UnrolledRunner runner;
};

void record_snapshot(ExperimentResult& result, const WeightSet& weights, const UnrolledRunner& runner) {
    const std::size_t t = runner.step_index();
    if (!result.spectra.empty() && result.spectra.back().step == t) return;
    auto s = snapshot(weights, runner.current().x, runner.unroll_source().x, t);
    result.radius_timeline.push_back({t, s.radius, s.radius_origin(), s.max_real()});
    result.spectra.push_back(std::move(s));
}

[[noreturn]] void abort_training(ExperimentResult& result, const UnrolledRunner& runner, const WeightSet& weights,
                                 const std::string& what) {
    result.training_steps = runner.step_index();
    result.weights = weights;
    result.train_rmse = rmse(result.trace, Phase::Train);
    throw RunAborted(what, std::move(result));
}

// Trains the readout, then runs the frozen test phase. Returns the runner
// positioned at the end of training so callers can continue from there.
TrainedRun train(const ExperimentConfig& config, std::uint64_t seed, Learner learner) {
    config.validate();
    ReservoirParams params = config.reservoir;
    params.seed = seed;
    auto [weights, initial] = init_network(params);

    TrainedRun run{ExperimentResult{}, UnrolledRunner(initial, config.schedule, params.dt)};
    ExperimentResult& result = run.result;
    result.seed = seed;
    result.g = params.g;
    result.schedule = config.schedule;

    UnrolledRunner& runner = run.runner;
    const UnrollSchedule& schedule = config.schedule;
    const std::size_t max_steps = config.stopping.max_steps;
    const std::set<std::size_t> extra(config.extra_snapshot_steps.begin(), config.extra_snapshot_steps.end());
    // The last two unroll instances are always captured so their spectra can be compared.
    const std::size_t hold = schedule.hold();
    const std::size_t penultimate = max_steps > hold ? max_steps - hold : 0;

    std::optional<TrainerState> trainer;
    if (learner == Learner::Force) trainer = force_init(params.n, config.rls_alpha);
    Vector last_w_out = weights.w_out;

    try {
        while (runner.step_index() < max_steps) {
            runner.advance(weights);
            const std::size_t t = runner.step_index();
            const Vector& r = runner.current().r;
            const double f = config.target(t);
            result.trace.push_back({t, Phase::Train, readout(weights, r), f});

            const bool update = config.update_cadence == UpdateCadence::EveryStep || schedule.is_instance_end(t);
            if (update) {
                if (learner == Learner::Force) {
                    force_update(*trainer, r, f);
                    weights.w_out = trainer->w_out;
                    last_w_out = trainer->last_w_out;
                } else {
                    last_w_out = weights.w_out;
                    weights.w_out = lsq_fixed_point_update(weights.w_out, r, f);
                }
            }

            bool converged = false;
            if (update && check_converged(weights.w_out, last_w_out, t, config.stopping)) {
                if (!result.converged_at) result.converged_at = t;
                converged = config.stop_on_convergence;
            }

            const bool instance_end = schedule.is_instance_end(t);
            const bool wanted = t == 1 || extra.count(t) > 0 ||
                                (instance_end && (t % config.snapshot_cadence == 0 || t == penultimate)) ||
                                converged || t == max_steps;
            if (wanted) record_snapshot(result, weights, runner);
            if (converged) break;
        }
    } catch (const DivergenceError& e) {
        abort_training(result, runner, weights, e.what());
    } catch (const EigenSolverError& e) {
        // A non-finite Jacobian means the weights already blew up.
        abort_training(result, runner, weights, e.what());
    }

    result.training_steps = runner.step_index();
    result.train_rmse = rmse(result.trace, Phase::Train);
    result.weights = weights;
    result.final_state = runner.current();
    result.final_unroll_state = runner.unroll_source();
    return run;
}

void run_test_phase(const ExperimentConfig& config, TrainedRun& run) {
    ExperimentResult& result = run.result;
    UnrolledRunner runner = run.runner;
    const std::size_t length = config.test_steps == 0 ? result.training_steps : config.test_steps;
    try {
        for (std::size_t i = 0; i < length; ++i) {
            runner.advance(result.weights);
            const std::size_t t = runner.step_index();
            result.trace.push_back({t, Phase::Test, readout(result.weights, runner.current().r), config.target(t)});
        }
    } catch (const DivergenceError& e) {
        result.test_rmse = rmse(result.trace, Phase::Test);
        throw RunAborted(e.what(), std::move(result));
    }
    result.test_rmse = rmse(result.trace, Phase::Test);
}

nlohmann::json config_json(const ExperimentConfig& config) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : parse_key_values(to_config_text(config))) j[k] = v;
    return j;
}

nlohmann::json result_json(const ExperimentConfig& config, const ExperimentResult& r, const std::string& status) {
    nlohmann::json j;
    j["status"] = status;
    j["config"] = config_json(config);
    j["seed"] = r.seed;
    j["g"] = r.g;
    j["unroll_mode"] = std::string(to_string(r.schedule.mode));
    j["unroll_interval"] = r.schedule.interval;
    j["converged_at"] = r.converged_at ? nlohmann::json(*r.converged_at) : nlohmann::json(nullptr);
    j["training_steps"] = r.training_steps;
    j["train_rmse"] = r.train_rmse;
    j["test_rmse"] = r.test_rmse;
    if (!r.spectra.empty()) {
        const auto& a = r.initial_spectrum();
        const auto& b = r.final_spectrum();
        j["radius_initial"] = a.radius;
        j["radius_final"] = b.radius;
        j["radius_origin_initial"] = a.radius_origin();
        j["radius_origin_final"] = b.radius_origin();
        j["max_real_initial"] = a.max_real();
        j["max_real_final"] = b.max_real();
        j["radius_initial_step"] = a.step;
        j["radius_final_step"] = b.step;
        if (r.spectra.size() >= 2) {
            j["final_pair_distance"] = spectra_distance(r.spectra[r.spectra.size() - 2], b);
        }
    }
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.spectra) steps.push_back(s.step);
    j["spectra_steps"] = steps;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::string g_label(double g) {
    std::ostringstream s;
    s << g;
    return s.str();
}

}  // namespace

ExperimentResult run_fixed_point(const ExperimentConfig& config, std::uint64_t seed) {
    auto run = train(config, seed, Learner::LeastSquares);
    run_test_phase(config, run);
    return std::move(run.result);
}

ExperimentResult run_time_varying(const ExperimentConfig& config, std::uint64_t seed) {
    auto run = train(config, seed, Learner::Force);
    run_test_phase(config, run);
    return std::move(run.result);
}

std::vector<SweepEntry> run_unroll_sweep(const ExperimentConfig& config, std::uint64_t seed) {
    std::vector<SweepEntry> entries;
    for (std::size_t k : config.sweep_intervals) {
        ExperimentConfig c = config;
        c.schedule = k == 1 ? UnrollSchedule::per_step() : UnrollSchedule::integrated(k);
        SweepEntry entry;
        entry.interval = k;
        try {
            entry.result = run_time_varying(c, seed);
        } catch (const RunAborted& e) {
            entry.result = e.partial();
            entry.error = e.what();
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

ValidationResult run_closed_loop_validation(const ExperimentConfig& config, std::uint64_t seed) {
    ValidationResult v;
    auto run = train(config, seed, Learner::LeastSquares);
    v.training = std::move(run.result);
    v.unrolled = v.training.final_spectrum();

    const double a = config.target.amplitude;
    try {
        v.fixed_point = solve_fixed_point(v.training.weights, a, config.fixed_point, v.training.final_state.x);
    } catch (const ConvergenceError& e) {
        throw FixedPointSolveError(e);
    }
    v.fixed_point_residual = fixed_point_residual(v.training.weights, a, v.fixed_point);
    v.closed_loop = closed_loop_snapshot(v.training.weights, v.fixed_point, v.unrolled.step);
    v.distance = spectra_distance(v.unrolled, v.closed_loop);
    return v;
}

PcaResult run_pca(const ExperimentConfig& config, std::uint64_t seed) {
    if (config.pca_window < 2) {
        throw InsufficientHistoryError("pca window must cover at least 2 steps");
    }
    auto run = train(config, seed, Learner::LeastSquares);
    PcaResult p;

    UnrolledRunner runner = run.runner;
    const auto n = static_cast<Eigen::Index>(config.reservoir.n);
    p.history.rows.resize(static_cast<Eigen::Index>(config.pca_window), n);
    for (std::size_t i = 0; i < config.pca_window; ++i) {
        runner.advance(run.result.weights);
        p.history.rows.row(static_cast<Eigen::Index>(i)) = runner.current().r.transpose();
        p.history.step_offsets.push_back(runner.step_index());
    }
    run_test_phase(config, run);
    p.training = std::move(run.result);

    p.decomposition = pc_decomposition(correlation_matrix(p.history));
    for (std::size_t a : config.pca_components) {
        if (a > static_cast<std::size_t>(n)) continue;
        PcTrajectory tr;
        tr.component = a;
        tr.projection = project_trajectory(p.history, p.decomposition, a);
        tr.fluctuation = p.history.length() >= 3 ? fluctuation_score(tr.projection) : 0.0;
        p.trajectories.push_back(std::move(tr));
    }
    return p;
}

std::filesystem::path run_directory(const ExperimentConfig& config, std::uint64_t seed) {
    return config.output_dir / std::string(to_string(config.experiment)) /
           ("g" + g_label(config.reservoir.g) + "_seed" + std::to_string(seed));
}

void write_result(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& status) {
    std::filesystem::create_directories(dir);
    for (const auto& s : result.spectra) write_spectrum_csv(dir / spectrum_file_name(s.step), s);
    write_radius_timeline_csv(dir / "radius_timeline.csv", result.radius_timeline);
    write_trace_csv(dir / "trace.csv", result.trace);
    write_json(dir / "summary.json", result_json(config, result, status));
}

void write_validation(const std::filesystem::path& dir, const ExperimentConfig& config, const ValidationResult& v) {
    write_result(dir, config, v.training);
    write_spectrum_csv(dir / "spectra_closed_loop.csv", v.closed_loop);
    auto j = result_json(config, v.training, "ok");
    j["spectra_distance"] = v.distance;
    j["fixed_point_residual"] = v.fixed_point_residual;
    j["closed_loop_radius"] = v.closed_loop.radius;
    j["closed_loop_radius_origin"] = v.closed_loop.radius_origin();
    write_json(dir / "summary.json", j);
}

void write_pca(const std::filesystem::path& dir, const ExperimentConfig& config, const PcaResult& p) {
    write_result(dir, config, p.training);
    write_fractions_csv(dir / "fractions.csv", p.decomposition.fractions);
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& tr : p.trajectories) {
        write_projection_csv(dir / projection_file_name(tr.component), p.history.step_offsets, tr.projection);
        scores[std::to_string(tr.component)] = tr.fluctuation;
    }
    auto j = result_json(config, p.training, "ok");
    j["fluctuation_scores"] = scores;
    j["pca_window"] = p.history.length();
    write_json(dir / "summary.json", j);
}

void write_sweep(const std::filesystem::path& dir, const ExperimentConfig& config,
                 const std::vector<SweepEntry>& entries) {
    std::filesystem::create_directories(dir);
    std::ofstream table(dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    table << "interval,status,train_rmse,test_rmse,radius_initial,radius_final\n";
    nlohmann::json j;
    j["config"] = config_json(config);
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        const std::string status = e.error.empty() ? "ok" : "failed";
        ExperimentConfig c = config;
        c.schedule = e.interval == 1 ? UnrollSchedule::per_step() : UnrollSchedule::integrated(e.interval);
        nlohmann::json row{{"interval", e.interval}, {"status", status}, {"error", e.error}};
        if (e.result) {
            write_result(dir / ("k" + std::to_string(e.interval)), c, *e.result, status);
            const auto& r = *e.result;
            const double r0 = r.spectra.empty() ? NAN : r.initial_spectrum().radius;
            const double r1 = r.spectra.empty() ? NAN : r.final_spectrum().radius;
            table << e.interval << ',' << status << ',' << format_float(r.train_rmse) << ','
                  << format_float(r.test_rmse) << ',' << format_float(r0) << ',' << format_float(r1) << '\n';
            row["train_rmse"] = r.train_rmse;
            row["test_rmse"] = r.test_rmse;
        } else {
            table << e.interval << ',' << status << ",nan,nan,nan,nan\n";
        }
        j["entries"].push_back(row);
    }
    write_json(dir / "summary.json", j);
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    int failures = 0;
    for (std::uint64_t seed : config.seeds) {
        const auto dir = run_directory(config, seed);
        try {
            switch (config.experiment) {
                case ExperimentKind::FixedPoint: {
                    auto r = run_fixed_point(config, seed);
                    write_result(dir, config, r);
                    log << dir.string() << ": converged_at=" << (r.converged_at ? std::to_string(*r.converged_at) : "-")
                        << " radius " << r.initial_spectrum().radius << " -> " << r.final_spectrum().radius << '\n';
                    break;
                }
                case ExperimentKind::TimeVarying: {
                    auto r = run_time_varying(config, seed);
                    write_result(dir, config, r);
                    log << dir.string() << ": train_rmse=" << r.train_rmse << " test_rmse=" << r.test_rmse
                        << " radius " << r.initial_spectrum().radius << " -> " << r.final_spectrum().radius << '\n';
                    break;
                }
                case ExperimentKind::UnrollSweep: {
                    auto entries = run_unroll_sweep(config, seed);
                    write_sweep(dir, config, entries);
                    for (const auto& e : entries) {
                        if (!e.error.empty()) {
                            ++failures;
                            log << dir.string() << ": k=" << e.interval << " failed: " << e.error << '\n';
                        } else {
                            log << dir.string() << ": k=" << e.interval << " train_rmse=" << e.result->train_rmse
                                << " test_rmse=" << e.result->test_rmse << '\n';
                        }
                    }
                    break;
                }
                case ExperimentKind::ClosedLoopValidation: {
                    auto v = run_closed_loop_validation(config, seed);
                    write_validation(dir, config, v);
                    log << dir.string() << ": spectra distance " << v.distance << '\n';
                    break;
                }
                case ExperimentKind::Pca: {
                    auto p = run_pca(config, seed);
                    write_pca(dir, config, p);
                    log << dir.string() << ": pca over " << p.history.length() << " steps\n";
                    break;
                }
            }
        } catch (const RunAborted& e) {
            ++failures;
            write_result(dir, config, e.partial(), std::string("aborted: ") + e.what());
            log << dir.string() << ": aborted: " << e.what() << '\n';
        } catch (const FixedPointSolveError& e) {
            ++failures;
            log << dir.string() << ": " << e.what() << '\n';
        } catch (const EigenSolverError& e) {
            ++failures;
            log << dir.string() << ": eigensolver: " << e.what() << '\n';
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace reservoir
