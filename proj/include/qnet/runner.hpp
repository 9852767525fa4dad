#pragma once

// Batch execution of configured experiments and their file outputs.
//
// Layout under the output directory, per experiment `<name>`:
//   <name>/manifest.txt      key=value record of config, seeds, oracles, estimates
//   <name>/report.csv        one row per functional estimate
//   <name>/curve.csv         figure presets: theta_or_phase,oracle_value,estimate
//   <name>/verdict.csv       locked runs
//   <name>/counts_*.csv      raw counts of every sweep or locked run

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/config.hpp"
#include "qnet/estimate.hpp"

namespace qnet {

inline constexpr std::string_view kVersion = "1.0.0";

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QNET_OUTPUT_DIR";

struct CurveRow {
  double theta;
  double oracle;
  double estimate;
};

struct CountsFile {
  std::string filename;
  std::vector<SegmentRecord> rows;
};

struct ExperimentOutcome {
  ExperimentConfig config;
  std::vector<FunctionalReport> reports;  // one per curve point for figure presets
  std::vector<CurveRow> curve;
  std::optional<WitnessVerdict> verdict;
  std::vector<CountsFile> counts;
  std::vector<std::pair<std::string, std::string>> manifest;  // ordered key=value entries
};

/// Runs one validated experiment without touching the filesystem.
/// Estimator failures propagate as FitError, CalibrationError or ProtocolError.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Writes every file of the outcome into `root / name`.
void write_outcome(const ExperimentOutcome& outcome, const std::filesystem::path& root);

/// Directory for an experiment: explicit override, then the config's
/// output_path, then $QNET_OUTPUT_DIR, then ./qnet_out.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::filesystem::path>& override_dir);

/// One line per preset naming the figure and inputs it reproduces.
std::string list_presets();

/// Figure preset curve rows, computed point by point with seeds derived from
/// the experiment seed and the point index.
std::vector<CurveRow> figure_curve(const ExperimentConfig& cfg,
                                   std::vector<FunctionalReport>* reports = nullptr);

}  // namespace qnet
