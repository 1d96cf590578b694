#pragma once

// Experiment drivers: train a readout while the network runs unrolled,
// capture spectra along the way, then test the frozen readout.

#include "reservoir/artifacts.hpp"
#include "reservoir/config.hpp"
#include "reservoir/pca.hpp"
#include "reservoir/spectra.hpp"
#include "reservoir/training.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace reservoir {

/// Steps a network under an unroll schedule and remembers the states the
/// schedule refers back to (previous state and the held unroll state).
class UnrolledRunner {
public:
    UnrolledRunner(ReservoirState initial, UnrollSchedule schedule, double dt);

    const ReservoirState& current() const { return current_; }
    std::size_t step_index() const { return current_.step; }
    const UnrollSchedule& schedule() const { return schedule_; }

    /// The state whose readout feeds the step leaving the current state.
    const ReservoirState& unroll_source() const;

    /// Takes one step. The feedback readout is evaluated with `weights` when
    /// a hold segment starts and kept for the rest of the segment.
    void advance(const WeightSet& weights);

private:
    const ReservoirState& state_at(std::size_t index) const;

    UnrollSchedule schedule_;
    double dt_;
    ReservoirState current_;
    ReservoirState previous_;
    ReservoirState held_;
    double z_hold_ = 0.0;
};

struct ExperimentResult {
    std::uint64_t seed = 0;
    double g = 0.0;
    UnrollSchedule schedule;
    std::vector<RadiusPoint> radius_timeline;
    std::vector<SpectrumSnapshot> spectra;
    std::vector<TracePoint> trace;
    std::optional<std::size_t> converged_at;
    std::size_t training_steps = 0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    /// Trained weights and the state at the end of training.
    WeightSet weights;
    ReservoirState final_state;
    ReservoirState final_unroll_state;

    const SpectrumSnapshot& initial_spectrum() const { return spectra.front(); }
    const SpectrumSnapshot& final_spectrum() const { return spectra.back(); }
    const SpectrumSnapshot* spectrum_at(std::size_t step) const;
};

/// Thrown when a run aborts; carries whatever was recorded up to that point.
class RunAborted : public std::runtime_error {
public:
    RunAborted(const std::string& what, ExperimentResult partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const ExperimentResult& partial() const { return partial_; }

private:
    ExperimentResult partial_;
};

struct ValidationResult {
    ExperimentResult training;
    SpectrumSnapshot unrolled;
    SpectrumSnapshot closed_loop;
    Vector fixed_point;
    double fixed_point_residual = 0.0;
    double distance = 0.0;
};

/// Raised when the closed-loop fixed point cannot be found; kept apart from
/// eigensolver failures.
class FixedPointSolveError : public std::runtime_error {
public:
    explicit FixedPointSolveError(const ConvergenceError& e)
        : std::runtime_error(std::string("closed-loop fixed point: ") + e.what()), residual_(e.residual()) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct PcTrajectory {
    std::size_t component = 0;
    Vector projection;
    double fluctuation = 0.0;
};

struct PcaResult {
    ExperimentResult training;
    RateHistory history;
    PcDecomposition decomposition;
    std::vector<PcTrajectory> trajectories;
};

struct SweepEntry {
    std::size_t interval = 0;
    std::optional<ExperimentResult> result;
    std::string error;
};

double rmse(const std::vector<TracePoint>& trace, Phase phase);

/// Train on a constant target with per-state exact-fit updates.
ExperimentResult run_fixed_point(const ExperimentConfig& config, std::uint64_t seed);

/// Train on a sinusoid with FORCE, then test the frozen readout.
ExperimentResult run_time_varying(const ExperimentConfig& config, std::uint64_t seed);

/// run_time_varying for each interval in config.sweep_intervals. Failures are
/// recorded per entry and do not stop the sweep.
std::vector<SweepEntry> run_unroll_sweep(const ExperimentConfig& config, std::uint64_t seed);

/// Compare the unrolled final-step spectrum with the closed-loop spectrum at
/// the fixed point of the trained network.
ValidationResult run_closed_loop_validation(const ExperimentConfig& config, std::uint64_t seed);

/// Fixed-point training followed by a frozen-readout window analysed with PCA.
PcaResult run_pca(const ExperimentConfig& config, std::uint64_t seed);

/// Directory of one run: <out>/<experiment>/g<g>_seed<seed>.
std::filesystem::path run_directory(const ExperimentConfig& config, std::uint64_t seed);

void write_result(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& status = "ok");
void write_validation(const std::filesystem::path& dir, const ExperimentConfig& config, const ValidationResult& v);
void write_pca(const std::filesystem::path& dir, const ExperimentConfig& config, const PcaResult& p);
void write_sweep(const std::filesystem::path& dir, const ExperimentConfig& config,
                 const std::vector<SweepEntry>& entries);

/// Runs the configured experiment for every seed and writes artifacts.
/// Returns 0 when every run succeeded; failures are reported on `log`.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace reservoir
