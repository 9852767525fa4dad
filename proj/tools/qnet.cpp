// qnet: batch runner for simulated controlled-SWAP interferometry experiments.
//
//   qnet run <config> [--seed N] [--mean-counts N0] [--output DIR]
//   qnet validate <config>
//   qnet presets
//
// Exit status: 0 success, 2 invalid configuration, 3 estimator failure,
// 4 I/O failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qnet/config.hpp"
#include "qnet/estimate.hpp"
#include "qnet/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEstimator = 3;
constexpr int kExitIo = 4;

struct LoadFailure {
  int code;
};

qnet::ConfigFile load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config '" << path << "'\n";
    throw LoadFailure{kExitIo};
  }
  try {
    return qnet::parse_config(in);
  } catch (const qnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    throw LoadFailure{kExitConfig};
  }
}

int run(const std::string& path, std::optional<std::uint64_t> seed,
        std::optional<double> mean_counts, std::optional<std::filesystem::path> output) {
  qnet::ConfigFile file = load(path);
  for (qnet::ExperimentConfig& cfg : file.experiments) {
    if (seed) cfg.seed = *seed;
    if (mean_counts) cfg.mean_counts = *mean_counts;
    try {
      qnet::validate(cfg);
    } catch (const qnet::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  std::vector<qnet::ExperimentOutcome> outcomes;
  for (const qnet::ExperimentConfig& cfg : file.experiments) {
    try {
      outcomes.push_back(qnet::run_experiment(cfg));
    } catch (const qnet::FitError& e) {
      std::cerr << "[" << cfg.name << "] fit failed: " << e.what() << '\n';
      return kExitEstimator;
    } catch (const qnet::CalibrationError& e) {
      std::cerr << "[" << cfg.name << "] calibration failed: " << e.what() << '\n';
      return kExitEstimator;
    } catch (const qnet::ProtocolError& e) {
      std::cerr << "[" << cfg.name << "] protocol error: " << e.what() << '\n';
      return kExitEstimator;
    }
  }

  for (const qnet::ExperimentOutcome& outcome : outcomes) {
    const std::filesystem::path dir = qnet::resolve_output_dir(outcome.config, output);
    try {
      qnet::write_outcome(outcome, dir);
    } catch (const std::exception& e) {
      std::cerr << "error: writing outputs under '" << dir.string() << "': " << e.what() << '\n';
      return kExitIo;
    }
    std::cout << outcome.config.name << " (" << qnet::to_string(outcome.config.experiment)
              << ") -> " << (dir / outcome.config.name).string() << '\n';
    for (const qnet::FunctionalReport& report : outcome.reports) {
      if (!outcome.curve.empty()) break;
      std::cout << "  " << qnet::to_string(report.kind) << ": estimate " << report.estimate
                << ", oracle " << report.oracle << ", abs_error " << report.abs_error << '\n';
    }
    if (!outcome.curve.empty()) {
      double worst = 0.0;
      for (const auto& report : outcome.reports) worst = std::max(worst, report.abs_error);
      std::cout << "  " << outcome.curve.size() << " curve points, max abs_error " << worst
                << '\n';
    }
    if (outcome.verdict) {
      std::cout << "  verdict " << qnet::to_string(outcome.verdict->verdict) << ", statistic "
                << outcome.verdict->statistic << " (threshold " << outcome.verdict->threshold
                << ")\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled-SWAP interferometer simulator and state-functional estimator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> mean_counts;
  std::optional<std::filesystem::path> output;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute every experiment in a config file");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--seed", seed, "Override the seed of every experiment");
  run_cmd->add_option("--mean-counts", mean_counts, "Override N0, expected counts at r = 1");
  run_cmd->add_option("--output", output,
                      std::string("Output directory (default: config output_path, $") +
                          qnet::kOutputDirEnv + ", ./qnet_out)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", config_path, "Config file")->required();

  app.add_subcommand("presets", "List the figure presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("presets")) {
      std::cout << qnet::list_presets();
      return kExitOk;
    }
    if (app.got_subcommand("validate")) {
      const qnet::ConfigFile file = load(config_path);
      std::cout << "OK (" << file.experiments.size() << " experiment"
                << (file.experiments.size() == 1 ? "" : "s") << ")\n";
      return kExitOk;
    }
    return run(config_path, seed, mean_counts, output);
  } catch (const LoadFailure& failure) {
    return failure.code;
  }
}
