#include "qnet/runner.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "qnet/network.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {

namespace fs = std::filesystem;

class Manifest {
 public:
  explicit Manifest(std::vector<std::pair<std::string, std::string>>& entries)
      : entries_(entries) {}

  template <typename T>
  void add(std::string key, const T& value) {
    entries_.emplace_back(std::move(key), fmt::format("{}", value));
  }

 private:
  std::vector<std::pair<std::string, std::string>>& entries_;
};

SweepPlan sweep_plan(const ExperimentConfig& cfg) {
  return SweepPlan{phase_grid(cfg.phase_points, cfg.phase_min, cfg.phase_max), cfg.mean_counts,
                   cfg.seed, cfg.drift_sigma, cfg.epsilon};
}

std::vector<SegmentRecord> as_segment_rows(const std::vector<CountRecord>& sweep) {
  std::vector<SegmentRecord> rows;
  rows.reserve(sweep.size());
  for (const CountRecord& r : sweep) rows.push_back(SegmentRecord{0, r});
  return rows;
}

std::vector<std::string> locked_specs(const ExperimentConfig& cfg) {
  if (!cfg.segment_states.empty()) return cfg.segment_states;
  if (cfg.experiment == Experiment::fig4a) return {"singlet", "HH", "singlet"};
  return {"triplet", "HH", "triplet"};
}

void record_report(Manifest& m, const std::string& prefix, const FunctionalReport& report) {
  m.add(prefix + "kind", to_string(report.kind));
  m.add(prefix + "estimate", report.estimate);
  m.add(prefix + "oracle", report.oracle);
  m.add(prefix + "abs_error", report.abs_error);
  for (const SubRun& run : report.runs) {
    m.add(prefix + "run." + run.label + ".seed", run.seed);
    m.add(prefix + "run." + run.label + ".visibility", run.fit.visibility_signed);
  }
}

void add_counts(ExperimentOutcome& out, const std::string& stem, const FunctionalReport& report) {
  for (const SubRun& run : report.runs) {
    out.counts.push_back(CountsFile{"counts_" + stem + run.label + ".csv",
                                    as_segment_rows(run.records)});
  }
}

DensityOp state_of(const std::string& spec) { return parse_state(spec).density; }

}  // namespace

std::vector<CurveRow> figure_curve(const ExperimentConfig& cfg,
                                   std::vector<FunctionalReport>* reports) {
  if (!is_figure_sweep(cfg.experiment)) {
    throw std::invalid_argument("figure_curve needs a fig3 preset");
  }
  const std::vector<double> thetas =
      phase_grid(cfg.theta_points, cfg.theta_min, cfg.theta_max, /*inclusive=*/true);
  const DensityOp mixed = cfg.state_b.empty() ? dephased_diagonal() : state_of(cfg.state_b);

  std::vector<CurveRow> rows;
  rows.reserve(thetas.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double theta = thetas[k];
    SweepPlan plan = sweep_plan(cfg);
    plan.seed = rng::derive_seed(cfg.seed, k);

    FunctionalReport report = [&] {
      switch (cfg.experiment) {
        case Experiment::fig3a:
          return estimate_overlap(ket_h().density(), hwp_prepared(theta).density(), plan);
        case Experiment::fig3b:
          return estimate_overlap(hwp_prepared(theta).density(), mixed, plan);
        case Experiment::fig3c:
          return estimate_witness(nonmax_entangled(theta, cfg.sign, PairBasis::HH_VV).density(),
                                  plan);
        default:
          return estimate_witness(nonmax_entangled(theta, cfg.sign, PairBasis::HV_VH).density(),
                                  plan);
      }
    }();
    rows.push_back(CurveRow{theta, report.oracle, report.estimate});
    if (reports != nullptr) reports->push_back(std::move(report));
  }
  return rows;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentOutcome out{cfg, {}, {}, std::nullopt, {}, {}};
  Manifest m(out.manifest);

  m.add("version", kVersion);
  m.add("name", cfg.name);
  m.add("experiment", to_string(cfg.experiment));
  m.add("seed", cfg.seed);
  m.add("mean_counts", cfg.mean_counts);
  m.add("epsilon", cfg.epsilon);
  m.add("drift_sigma", cfg.drift_sigma);

  if (is_locked(cfg.experiment)) {
    const std::vector<std::string> specs = locked_specs(cfg);
    LockedRunPlan plan;
    plan.lock_phase = cfg.lock_phase;
    for (const std::string& spec : specs) plan.segment_states.push_back(state_of(spec));
    plan.dots_per_segment = cfg.dots_per_segment;
    plan.mean_counts = cfg.mean_counts;
    plan.seed = cfg.seed;
    plan.drift_sigma = cfg.drift_sigma;
    plan.epsilon = cfg.epsilon;

    m.add("segment_states", fmt::format("{};{};{}", specs[0], specs[1], specs[2]));
    m.add("lock_phase", cfg.lock_phase);
    m.add("dots_per_segment", cfg.dots_per_segment);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      m.add(fmt::format("segment.{}.oracle_visibility", s), ideal_visibility(plan.segment_states[s]));
    }

    std::vector<SegmentRecord> rows = simulate_locked_run(plan);
    out.verdict = witness_verdict(rows, cfg.threshold);
    m.add("verdict", to_string(out.verdict->verdict));
    m.add("statistic", out.verdict->statistic);
    m.add("threshold", out.verdict->threshold);
    m.add("mean_outer", out.verdict->mean_outer);
    m.add("mean_middle", out.verdict->mean_middle);
    out.counts.push_back(CountsFile{"counts_locked.csv", std::move(rows)});
    return out;
  }

  m.add("phase_points", cfg.phase_points);
  m.add("phase_min", cfg.phase_min);
  m.add("phase_max", cfg.phase_max);

  if (is_figure_sweep(cfg.experiment)) {
    m.add("theta_points", cfg.theta_points);
    m.add("theta_min", cfg.theta_min);
    m.add("theta_max", cfg.theta_max);
    m.add("sign", cfg.sign == Sign::Plus ? "+" : "-");
    out.curve = figure_curve(cfg, &out.reports);

    double worst = 0.0;
    double worst_concurrence_gap = 0.0;
    for (std::size_t k = 0; k < out.reports.size(); ++k) {
      const std::string prefix = fmt::format("point.{:02}.", k);
      m.add(prefix + "theta", out.curve[k].theta);
      record_report(m, prefix, out.reports[k]);
      add_counts(out, fmt::format("{:02}_", k), out.reports[k]);
      worst = std::max(worst, out.reports[k].abs_error);
      if (cfg.experiment == Experiment::fig3d) {
        const double c = oracle_wootters_concurrence(
            nonmax_entangled(out.curve[k].theta, cfg.sign, PairBasis::HV_VH).density());
        m.add(prefix + "wootters_concurrence", c);
        worst_concurrence_gap =
            std::max(worst_concurrence_gap, std::abs(std::abs(out.curve[k].oracle) - c));
      }
    }
    m.add("max_abs_error", worst);
    if (cfg.experiment == Experiment::fig3d) {
      m.add("max_concurrence_gap", worst_concurrence_gap);
    }
    return out;
  }

  const SweepPlan plan = sweep_plan(cfg);
  FunctionalReport report = [&] {
    switch (cfg.experiment) {
      case Experiment::overlap:
        m.add("state_a", cfg.state_a);
        m.add("state_b", cfg.state_b);
        return estimate_overlap(state_of(cfg.state_a), state_of(cfg.state_b), plan);
      case Experiment::purity:
        m.add("state", cfg.state);
        return estimate_purity(state_of(cfg.state), plan);
      case Experiment::fidelity:
        m.add("psi", cfg.psi);
        m.add("state", cfg.state);
        return estimate_fidelity(*parse_state(cfg.psi).pure, state_of(cfg.state), plan);
      case Experiment::hsdist:
        m.add("state_a", cfg.state_a);
        m.add("state_b", cfg.state_b);
        return estimate_hs_distance(state_of(cfg.state_a), state_of(cfg.state_b), plan);
      default:
        m.add("state", cfg.state);
        return estimate_witness(state_of(cfg.state), plan);
    }
  }();

  record_report(m, "report.", report);
  if (cfg.experiment == Experiment::witness_sweep) {
    const DensityOp rho = state_of(cfg.state);
    const double ppt = oracle_ppt_min_eigenvalue(rho);
    m.add("ppt_min_eigenvalue", ppt);
    m.add("witness_detects", report.estimate < 0.0 ? "entangled" : "inconclusive");
  }
  add_counts(out, "", report);
  out.reports.push_back(std::move(report));
  return out;
}

void write_outcome(const ExperimentOutcome& outcome, const fs::path& root) {
  const fs::path dir = root / outcome.config.name;
  fs::create_directories(dir);

  const auto open = [&](const std::string& filename) {
    std::ofstream file(dir / filename, std::ios::binary | std::ios::trunc);
    if (!file) throw fs::filesystem_error("cannot open for writing", dir / filename,
                                          std::make_error_code(std::errc::io_error));
    file.exceptions(std::ios::failbit | std::ios::badbit);
    return file;
  };

  {
    std::ofstream file = open("manifest.txt");
    for (const auto& [key, value] : outcome.manifest) file << key << '=' << value << '\n';
  }
  if (!outcome.reports.empty()) {
    std::ofstream file = open("report.csv");
    file << kReportCsvHeader << '\n';
    for (const FunctionalReport& report : outcome.reports) file << to_csv_row(report) << '\n';
  }
  if (!outcome.curve.empty()) {
    std::ofstream file = open("curve.csv");
    file << "theta_or_phase,oracle_value,estimate\n";
    for (const CurveRow& row : outcome.curve) {
      file << fmt::format("{},{},{}\n", row.theta, row.oracle, row.estimate);
    }
  }
  if (outcome.verdict) {
    std::ofstream file = open("verdict.csv");
    file << kVerdictCsvHeader << '\n' << to_csv_row(*outcome.verdict) << '\n';
  }
  for (const CountsFile& counts : outcome.counts) {
    std::ofstream file = open(counts.filename);
    write_counts_csv(file, counts.rows);
  }
}

fs::path resolve_output_dir(const ExperimentConfig& cfg,
                            const std::optional<fs::path>& override_dir) {
  if (override_dir) return *override_dir;
  if (!cfg.output_path.empty()) return cfg.output_path;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "qnet_out";
}

std::string list_presets() {
  return "fig3a  figure 3(a): overlap of |H⟩ with cos2θ|H⟩+sin2θ|V⟩, θ in [0, π/4]\n"
         "fig3b  figure 3(b): overlap of cos2θ|H⟩+sin2θ|V⟩ with [[0.5,0.29],[0.29,0.5]] "
         "(HWP 22.5° + quartz)\n"
         "fig3c  figure 3(c): witness value of cos2θ|HH⟩±sin2θ|VV⟩ (constant v = 1)\n"
         "fig3d  figure 3(d): witness value of cos2θ|HV⟩±sin2θ|VH⟩ (|v| = concurrence)\n"
         "fig4a  figure 4(a,b): phase-locked flip, singlet (|HV⟩-|VH⟩)/√2 / |HH⟩ / singlet, "
         "50 dots each\n"
         "fig4c  figure 4(c,d): phase-locked run, triplet (|HV⟩+|VH⟩)/√2 / |HH⟩ / triplet, "
         "no flip\n";
}

}  // namespace qnet
