#pragma once

// Experiment configuration and its key = value text form.
//
// The text form is one `key = value` pair per line; blank lines and lines
// starting with '#' are ignored. Lists are comma separated. Every field is
// written by `to_config_text` and read back by `apply_config_text`.

#include "reservoir/dynamics.hpp"
#include "reservoir/training.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace reservoir {

enum class ExperimentKind { FixedPoint, TimeVarying, UnrollSweep, ClosedLoopValidation, Pca };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

enum class UpdateCadence { EveryStep, InstanceEnd };

std::string_view to_string(UpdateCadence cadence);
UpdateCadence parse_update_cadence(std::string_view text);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::FixedPoint;
    ReservoirParams reservoir;
    TargetFunction target;
    UnrollSchedule schedule;
    StoppingCriteria stopping;
    std::size_t snapshot_cadence = 10;
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path output_dir = "runs";

    /// Stop training as soon as `stopping` triggers. When false the run
    /// trains for stopping.max_steps and only records the convergence step.
    bool stop_on_convergence = true;
    UpdateCadence update_cadence = UpdateCadence::InstanceEnd;
    double rls_alpha = 1.0;
    /// Frozen-readout test phase length; 0 means "same as training".
    std::size_t test_steps = 0;
    /// Additional steps at which spectra are always captured.
    std::vector<std::size_t> extra_snapshot_steps;
    std::size_t pca_window = 500;
    std::vector<std::size_t> pca_components{1, 2, 3, 41, 42};
    std::vector<std::size_t> sweep_intervals{2, 10, 50, 100};
    FixedPointOptions fixed_point;

    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// Paper-scale defaults for each experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

std::string to_config_text(const ExperimentConfig& config);

/// Parses `key = value` text into a flat map. Throws ConfigError on a
/// malformed line or a duplicate key.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Overrides fields of `config` from a parsed map. Unknown keys are errors.
void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& values);

ExperimentConfig apply_config_text(ExperimentConfig config, std::string_view text);
ExperimentConfig load_config_file(ExperimentConfig base, const std::filesystem::path& path);

}  // namespace reservoir
