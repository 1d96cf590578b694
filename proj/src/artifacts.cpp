#include "reservoir/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace reservoir {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string_view to_string(Phase phase) { return phase == Phase::Train ? "train" : "test"; }

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
}

std::string spectrum_file_name(std::size_t step) { return "spectra_" + std::to_string(step) + ".csv"; }

std::string projection_file_name(std::size_t component) { return "pc_" + std::to_string(component) + ".csv"; }

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSnapshot& s) {
    auto out = open_for_write(path);
    out << "re,im\n";
    for (const auto& l : s.eigenvalues) out << format_float(l.real()) << ',' << format_float(l.imag()) << '\n';
    finish(out, path);
}

void write_radius_timeline_csv(const std::filesystem::path& path, const std::vector<RadiusPoint>& points) {
    auto out = open_for_write(path);
    out << "step,radius_center,radius_origin\n";
    for (const auto& p : points) {
        out << p.step << ',' << format_float(p.radius_center) << ',' << format_float(p.radius_origin) << '\n';
    }
    finish(out, path);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace) {
    auto out = open_for_write(path);
    out << "step,phase,z,target\n";
    for (const auto& p : trace) {
        out << p.step << ',' << to_string(p.phase) << ',' << format_float(p.z) << ',' << format_float(p.target)
            << '\n';
    }
    finish(out, path);
}

void write_projection_csv(const std::filesystem::path& path, const std::vector<std::size_t>& steps,
                          const Vector& projection) {
    if (steps.size() != static_cast<std::size_t>(projection.size())) {
        throw DimensionError("projection csv: step list and series differ in length");
    }
    auto out = open_for_write(path);
    out << "step,projection\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
        out << steps[i] << ',' << format_float(projection[static_cast<Eigen::Index>(i)]) << '\n';
    }
    finish(out, path);
}

void write_fractions_csv(const std::filesystem::path& path, const Vector& fractions) {
    auto out = open_for_write(path);
    out << "component,fraction\n";
    for (Eigen::Index i = 0; i < fractions.size(); ++i) out << (i + 1) << ',' << format_float(fractions[i]) << '\n';
    finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
    table.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

}  // namespace reservoir
