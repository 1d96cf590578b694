#include "reservoir/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace reservoir {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<T>(parse_u64(key, item)));
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FixedPoint: return "fixed-point";
        case ExperimentKind::TimeVarying: return "time-varying";
        case ExperimentKind::UnrollSweep: return "unroll-sweep";
        case ExperimentKind::ClosedLoopValidation: return "validate-closed-loop";
        case ExperimentKind::Pca: return "pca";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (auto kind : {ExperimentKind::FixedPoint, ExperimentKind::TimeVarying, ExperimentKind::UnrollSweep,
                      ExperimentKind::ClosedLoopValidation, ExperimentKind::Pca}) {
        if (to_string(kind) == text) return kind;
    }
    throw ConfigError("unknown experiment '" + std::string(text) + "'");
}

std::string_view to_string(UpdateCadence cadence) {
    return cadence == UpdateCadence::EveryStep ? "every-step" : "instance-end";
}

UpdateCadence parse_update_cadence(std::string_view text) {
    if (text == "every-step") return UpdateCadence::EveryStep;
    if (text == "instance-end") return UpdateCadence::InstanceEnd;
    throw ConfigError("unknown update cadence '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
    reservoir.validate();
    if (snapshot_cadence == 0) throw ConfigError("snapshot_cadence must be positive");
    if (stopping.max_steps == 0) throw ConfigError("steps must be positive");
    if (!(stopping.weight_delta_tol > 0.0)) throw ConfigError("weight_delta_tol must be positive");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (schedule.interval == 0) throw ConfigError("unroll_interval must be positive");
    if (!(rls_alpha > 0.0)) throw ConfigError("rls_alpha must be positive");
    for (auto a : pca_components) {
        if (a == 0) throw ConfigError("pca components are 1-based");
    }
    for (auto k : sweep_intervals) {
        if (k == 0) throw ConfigError("sweep intervals must be positive");
    }
    const bool wants_fixed_point = experiment == ExperimentKind::FixedPoint ||
                                   experiment == ExperimentKind::ClosedLoopValidation ||
                                   experiment == ExperimentKind::Pca;
    if (wants_fixed_point && target.kind != TargetKind::FixedPoint) {
        throw ConfigError(std::string(to_string(experiment)) + " requires a fixed-point target");
    }
    if (!wants_fixed_point && target.kind != TargetKind::Sinusoid) {
        throw ConfigError(std::string(to_string(experiment)) + " requires a sinusoid target");
    }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    auto reservoir_eq = [](const ReservoirParams& x, const ReservoirParams& y) {
        return x.n == y.n && x.g == y.g && x.dt == y.dt && x.init_state_scale == y.init_state_scale &&
               x.feedback_scale == y.feedback_scale && x.seed == y.seed;
    };
    auto target_eq = [](const TargetFunction& x, const TargetFunction& y) {
        return x.kind == y.kind && x.amplitude == y.amplitude && x.omega == y.omega && x.time_scale == y.time_scale;
    };
    return a.experiment == b.experiment && reservoir_eq(a.reservoir, b.reservoir) && target_eq(a.target, b.target) &&
           a.schedule.mode == b.schedule.mode && a.schedule.interval == b.schedule.interval &&
           a.stopping.max_steps == b.stopping.max_steps &&
           a.stopping.weight_delta_tol == b.stopping.weight_delta_tol && a.snapshot_cadence == b.snapshot_cadence &&
           a.seeds == b.seeds && a.output_dir == b.output_dir && a.stop_on_convergence == b.stop_on_convergence &&
           a.update_cadence == b.update_cadence && a.rls_alpha == b.rls_alpha && a.test_steps == b.test_steps &&
           a.extra_snapshot_steps == b.extra_snapshot_steps && a.pca_window == b.pca_window &&
           a.pca_components == b.pca_components && a.sweep_intervals == b.sweep_intervals &&
           a.fixed_point.max_iters == b.fixed_point.max_iters && a.fixed_point.tol == b.fixed_point.tol &&
           a.fixed_point.relaxation == b.fixed_point.relaxation;
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    c.reservoir.n = 1000;
    c.seeds = {1};
    c.reservoir.seed = 1;
    switch (kind) {
        case ExperimentKind::FixedPoint:
        case ExperimentKind::ClosedLoopValidation:
        case ExperimentKind::Pca:
            c.reservoir.g = kind == ExperimentKind::FixedPoint ? 1.5 : 0.9;
            c.reservoir.dt = 1.0;
            c.target = TargetFunction::fixed_point(1.5);
            c.schedule = UnrollSchedule::per_step();
            c.stopping = {800, 1e-5};
            c.snapshot_cadence = 10;
            c.stop_on_convergence = true;
            c.update_cadence = UpdateCadence::InstanceEnd;
            break;
        case ExperimentKind::TimeVarying:
        case ExperimentKind::UnrollSweep:
            c.reservoir.g = 1.5;
            c.reservoir.dt = 0.1;
            c.target = TargetFunction::sinusoid(20.0 * std::numbers::pi, 0.001, 1.0);
            c.schedule = UnrollSchedule::per_step();
            c.stopping = {6000, 1e-5};
            c.snapshot_cadence = 500;
            c.stop_on_convergence = false;
            c.update_cadence = UpdateCadence::EveryStep;
            c.extra_snapshot_steps = {5600};
            break;
    }
    return c;
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "experiment = " << to_string(c.experiment) << '\n';
    out << "n = " << c.reservoir.n << '\n';
    out << "g = " << format_double(c.reservoir.g) << '\n';
    out << "dt = " << format_double(c.reservoir.dt) << '\n';
    out << "init_state_scale = " << format_double(c.reservoir.init_state_scale) << '\n';
    out << "feedback_scale = " << format_double(c.reservoir.feedback_scale) << '\n';
    out << "seed = " << c.reservoir.seed << '\n';
    out << "seeds = " << join(c.seeds) << '\n';
    out << "target = " << to_string(c.target.kind) << '\n';
    out << "target_amplitude = " << format_double(c.target.amplitude) << '\n';
    out << "omega = " << format_double(c.target.omega) << '\n';
    out << "time_scale = " << format_double(c.target.time_scale) << '\n';
    out << "unroll_mode = " << to_string(c.schedule.mode) << '\n';
    out << "unroll_interval = " << c.schedule.interval << '\n';
    out << "steps = " << c.stopping.max_steps << '\n';
    out << "weight_delta_tol = " << format_double(c.stopping.weight_delta_tol) << '\n';
    out << "stop_on_convergence = " << (c.stop_on_convergence ? "true" : "false") << '\n';
    out << "update_cadence = " << to_string(c.update_cadence) << '\n';
    out << "snapshot_cadence = " << c.snapshot_cadence << '\n';
    out << "extra_snapshot_steps = " << join(c.extra_snapshot_steps) << '\n';
    out << "rls_alpha = " << format_double(c.rls_alpha) << '\n';
    out << "test_steps = " << c.test_steps << '\n';
    out << "pca_window = " << c.pca_window << '\n';
    out << "pca_components = " << join(c.pca_components) << '\n';
    out << "sweep_intervals = " << join(c.sweep_intervals) << '\n';
    out << "fixed_point_max_iters = " << c.fixed_point.max_iters << '\n';
    out << "fixed_point_tol = " << format_double(c.fixed_point.tol) << '\n';
    out << "fixed_point_relaxation = " << format_double(c.fixed_point.relaxation) << '\n';
    out << "out_dir = " << c.output_dir.string() << '\n';
    return out.str();
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        for (auto& ch : key) {
            if (ch == '-') ch = '_';
        }
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
    }
    return out;
}

void apply_key_values(ExperimentConfig& c, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        if (key == "experiment") c.experiment = parse_experiment_kind(value);
        else if (key == "n") c.reservoir.n = parse_u64(key, value);
        else if (key == "g") c.reservoir.g = parse_double(key, value);
        else if (key == "dt") c.reservoir.dt = parse_double(key, value);
        else if (key == "init_state_scale") c.reservoir.init_state_scale = parse_double(key, value);
        else if (key == "feedback_scale") c.reservoir.feedback_scale = parse_double(key, value);
        else if (key == "seed") c.reservoir.seed = parse_u64(key, value);
        else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(key, value);
        else if (key == "target") c.target.kind = parse_target_kind(value);
        else if (key == "target_amplitude") c.target.amplitude = parse_double(key, value);
        else if (key == "omega") c.target.omega = parse_double(key, value);
        else if (key == "time_scale") c.target.time_scale = parse_double(key, value);
        else if (key == "unroll_mode") c.schedule.mode = parse_unroll_mode(value);
        else if (key == "unroll_interval") c.schedule.interval = parse_u64(key, value);
        else if (key == "steps") c.stopping.max_steps = parse_u64(key, value);
        else if (key == "weight_delta_tol") c.stopping.weight_delta_tol = parse_double(key, value);
        else if (key == "stop_on_convergence") c.stop_on_convergence = parse_bool(key, value);
        else if (key == "update_cadence") c.update_cadence = parse_update_cadence(value);
        else if (key == "snapshot_cadence") c.snapshot_cadence = parse_u64(key, value);
        else if (key == "extra_snapshot_steps") c.extra_snapshot_steps = parse_list<std::size_t>(key, value);
        else if (key == "rls_alpha") c.rls_alpha = parse_double(key, value);
        else if (key == "test_steps") c.test_steps = parse_u64(key, value);
        else if (key == "pca_window") c.pca_window = parse_u64(key, value);
        else if (key == "pca_components") c.pca_components = parse_list<std::size_t>(key, value);
        else if (key == "sweep_intervals") c.sweep_intervals = parse_list<std::size_t>(key, value);
        else if (key == "fixed_point_max_iters") c.fixed_point.max_iters = parse_u64(key, value);
        else if (key == "fixed_point_tol") c.fixed_point.tol = parse_double(key, value);
        else if (key == "fixed_point_relaxation") c.fixed_point.relaxation = parse_double(key, value);
        else if (key == "out_dir") c.output_dir = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

ExperimentConfig apply_config_text(ExperimentConfig config, std::string_view text) {
    apply_key_values(config, parse_key_values(text));
    return config;
}

ExperimentConfig load_config_file(ExperimentConfig base, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return apply_config_text(std::move(base), buf.str());
}

}  // namespace reservoir
