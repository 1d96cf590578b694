#pragma once

// CSV and JSON artifacts written per run.
//
//   spectra_<step>.csv     re,im
//   radius_timeline.csv    step,radius_center,radius_origin
//   trace.csv              step,phase,z,target
//   pc_<a>.csv             step,projection
//   fractions.csv          component,fraction
//   summary.json
//
// Floats are written with 17 significant digits.

#include "reservoir/spectra.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace reservoir {

enum class Phase { Train, Test };

std::string_view to_string(Phase phase);

struct RadiusPoint {
    std::size_t step = 0;
    double radius_center = 0.0;
    double radius_origin = 0.0;
    double max_real = 0.0;
};

struct TracePoint {
    std::size_t step = 0;
    Phase phase = Phase::Train;
    double z = 0.0;
    double target = 0.0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws std::out_of_range when absent.
    std::size_t column(std::string_view name) const;
};

std::string format_float(double v);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSnapshot& s);
void write_radius_timeline_csv(const std::filesystem::path& path, const std::vector<RadiusPoint>& points);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace);
void write_projection_csv(const std::filesystem::path& path, const std::vector<std::size_t>& steps,
                          const Vector& projection);
void write_fractions_csv(const std::filesystem::path& path, const Vector& fractions);

/// Reads a comma-separated file with a header row. Throws std::runtime_error
/// when the file cannot be opened or a row has the wrong arity.
CsvTable read_csv(const std::filesystem::path& path);

std::string spectrum_file_name(std::size_t step);
std::string projection_file_name(std::size_t component);

}  // namespace reservoir
