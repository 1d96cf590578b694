// reservoir-spectra: run the unrolled-training experiments and write CSV/JSON artifacts.

#include "reservoir/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

struct Flags {
    std::map<std::string, std::string> values;
    std::string config_file;
    bool print_config = false;
};

void add_common(CLI::App* cmd, Flags& flags) {
    auto opt = [&](const char* name, const char* key, const char* help) {
        cmd->add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
    };
    opt("--n", "n", "Number of neurons");
    opt("--g", "g", "Synaptic gain");
    opt("--dt", "dt", "Euler step");
    opt("--init-state-scale", "init_state_scale", "Std-dev of the initial state");
    opt("--feedback-scale", "feedback_scale", "Multiplier on the U(-1,1) feedback weights");
    opt("--seed", "seeds", "Single seed");
    opt("--seeds", "seeds", "Comma-separated seeds");
    opt("--steps", "steps", "Maximum training steps");
    opt("--weight-delta-tol", "weight_delta_tol", "Readout change that counts as converged");
    opt("--unroll-mode", "unroll_mode", "closed-loop | per-step | integrated");
    opt("--unroll-interval", "unroll_interval", "Steps between unroll instances (k)");
    opt("--target-amplitude", "target_amplitude", "Target amplitude A");
    opt("--omega", "omega", "Sinusoid angular frequency");
    opt("--time-scale", "time_scale", "Step-to-time factor for the sinusoid");
    opt("--snapshot-cadence", "snapshot_cadence", "Steps between spectrum snapshots");
    opt("--rls-alpha", "rls_alpha", "RLS initialisation P = I/alpha");
    opt("--test-steps", "test_steps", "Frozen-readout test length (0: same as training)");
    opt("--pca-window", "pca_window", "Post-training steps used for PCA");
    opt("--pca-components", "pca_components", "Comma-separated 1-based components");
    opt("--sweep-intervals", "sweep_intervals", "Comma-separated unroll intervals");
    opt("--out-dir", "out_dir", "Artifact root directory");
    cmd->add_option("--config", flags.config_file, "key = value file; its entries override flags");
    cmd->add_flag("--print-config", flags.print_config, "Print the resolved configuration and exit");
}

reservoir::ExperimentConfig resolve(reservoir::ExperimentKind kind, Flags flags) {
    using namespace reservoir;
    ExperimentConfig config = default_config(kind);
    if (auto it = flags.values.find("unroll_interval"); it != flags.values.end() && !flags.values.count("unroll_mode")) {
        flags.values["unroll_mode"] = it->second == "1" ? "per-step" : "integrated";
    }
    apply_key_values(config, flags.values);
    if (!flags.config_file.empty()) config = load_config_file(config, flags.config_file);
    config.experiment = kind;
    if (!config.seeds.empty()) config.reservoir.seed = config.seeds.front();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace reservoir;
    CLI::App app{"Train feedback reservoirs under unrolled dynamics and track their eigenvalue spectra"};
    app.require_subcommand(1);

    const std::pair<const char*, ExperimentKind> commands[] = {
        {"fixed-point", ExperimentKind::FixedPoint},
        {"time-varying", ExperimentKind::TimeVarying},
        {"unroll-sweep", ExperimentKind::UnrollSweep},
        {"validate-closed-loop", ExperimentKind::ClosedLoopValidation},
        {"pca", ExperimentKind::Pca},
    };
    const char* help[] = {
        "Least-squares training on a constant target",
        "FORCE training on a sinusoid, then a frozen-readout test",
        "time-varying over several integrated unroll intervals",
        "Compare the unrolled spectrum with the closed-loop fixed-point spectrum",
        "PCA of post-training firing rates",
    };
    std::map<std::string, Flags> flags;
    std::map<std::string, ExperimentKind> kinds;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        auto* cmd = app.add_subcommand(commands[i].first, help[i]);
        add_common(cmd, flags[commands[i].first]);
        kinds[commands[i].first] = commands[i].second;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto* sub : app.get_subcommands()) {
            const auto& name = sub->get_name();
            const auto config = resolve(kinds.at(name), flags.at(name));
            if (flags.at(name).print_config) {
                std::cout << to_config_text(config);
                return 0;
            }
            return run_experiment(config, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
