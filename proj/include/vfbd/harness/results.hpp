#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vfbd/harness/benchmark.hpp"
#include "vfbd/harness/monte_carlo.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/mor/error_report.hpp"
#include "vfbd/observer/ekf.hpp"

namespace vfbd::harness {

/// One output CSV. Tables holding wall-clock measurements are marked
/// non-deterministic; everything else is bit-identical across repeated runs.
struct CsvTable {
    std::string name;   ///< file name inside the output directory
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool deterministic = true;

    void add_row(std::vector<std::string> row);
};

struct ResultSet {
    std::vector<CsvTable> tables;
    /// Files already written into the output directory that the manifest should list.
    std::vector<std::string> attachments;
};

struct ManifestEntry {
    std::string file;
    std::size_t bytes = 0;
    std::string sha256;
    bool deterministic = true;
};

inline constexpr const char* kManifestName = "manifest.csv";

/// Writes every table plus manifest.csv (file,bytes,sha256,deterministic, sorted by
/// file name). Throws IoError naming the path; ConfigError for duplicate names.
std::vector<ManifestEntry> emit_results(const ResultSet& results, const std::string& out_dir);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Reads a CSV written by emit_results back into a table.
CsvTable load_csv_table(const std::string& path);

std::vector<ManifestEntry> load_manifest(const std::string& path);

// Table builders.
CsvTable trajectory_table(const std::string& name, const model::Trajectory& traj);
CsvTable step_time_table(const std::string& name, const model::Trajectory& traj);
CsvTable rom_report_table(const std::string& name, const mor::RomErrorReport& rep);
CsvTable reduction_log_table(const std::string& name, const mor::ReductionResult& red);
CsvTable observer_table(const std::string& name, const std::vector<observer::ObserverLogRow>& rows);
CsvTable timing_table(const std::string& name, const TimingReport& report);
CsvTable signal_table(const std::string& name, const model::SignalLog& log);

/// summary.csv, bands.csv, runs.csv and step_times.csv of a Monte-Carlo study.
std::vector<CsvTable> monte_carlo_tables(const std::string& prefix, const MonteCarloResult& mc);

} // namespace vfbd::harness
