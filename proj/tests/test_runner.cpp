#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qnet/runner.hpp"

using namespace qnet;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

ExperimentConfig preset(Experiment e, std::string name) {
  ExperimentConfig cfg;
  cfg.name = std::move(name);
  cfg.experiment = e;
  cfg.seed = 2024;
  return cfg;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("qnet_runner_" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("preset listing", "[runner]") {
  const std::string listing = list_presets();
  CHECK(listing == list_presets());
  for (const char* name : {"fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4c"}) {
    CHECK_THAT(listing, ContainsSubstring(name));
  }
  std::istringstream lines(listing);
  std::string line;
  bool fig3d = false;
  bool fig4c = false;
  while (std::getline(lines, line)) {
    if (line.starts_with("fig3d")) fig3d = line.find("cos2θ|HV⟩±sin2θ|VH⟩") != std::string::npos;
    if (line.starts_with("fig4c")) fig4c = line.find("triplet (|HV⟩+|VH⟩)/√2") != std::string::npos;
  }
  CHECK(fig3d);
  CHECK(fig4c);
}

TEST_CASE("fig3a curve", "[runner]") {
  const ExperimentOutcome out = run_experiment(preset(Experiment::fig3a, "a"));
  REQUIRE(out.curve.size() == 19);
  CHECK(out.curve.front().theta == 0.0);
  CHECK(out.curve.back().theta == pi / 4);
  for (const CurveRow& row : out.curve) {
    const double c = std::cos(2 * row.theta);
    CHECK_THAT(row.oracle, WithinAbs(c * c, 1e-12));
    CHECK(std::abs(row.estimate - row.oracle) <= 0.03);
  }
  CHECK(out.reports.size() == 19);
  CHECK(out.counts.size() == 38);
}

TEST_CASE("figure oracles do not depend on the seed", "[runner]") {
  for (const Experiment e : {Experiment::fig3b, Experiment::fig3c, Experiment::fig3d}) {
    ExperimentConfig a = preset(e, "x");
    ExperimentConfig b = a;
    b.seed = 77;
    a.mean_counts = b.mean_counts = 200;
    a.theta_points = b.theta_points = 5;
    const std::vector<CurveRow> ca = figure_curve(a);
    const std::vector<CurveRow> cb = figure_curve(b);
    for (std::size_t k = 0; k < ca.size(); ++k) CHECK(ca[k].oracle == cb[k].oracle);
  }
}

TEST_CASE("locked presets", "[runner]") {
  const ExperimentOutcome flip = run_experiment(preset(Experiment::fig4a, "flip"));
  REQUIRE(flip.verdict.has_value());
  CHECK(flip.verdict->verdict == Verdict::Entangled);
  REQUIRE(flip.counts.size() == 1);
  CHECK(flip.counts.front().rows.size() == 150);

  const ExperimentOutcome steady = run_experiment(preset(Experiment::fig4c, "steady"));
  REQUIRE(steady.verdict.has_value());
  CHECK(steady.verdict->verdict == Verdict::Inconclusive);

  ExperimentConfig custom = preset(Experiment::witness_locked, "custom");
  custom.segment_states = {"werner:0.9", "HH", "werner:0.9"};
  CHECK(run_experiment(custom).verdict->verdict == Verdict::Entangled);
}

TEST_CASE("single-functional experiments", "[runner]") {
  ExperimentConfig purity = preset(Experiment::purity, "p");
  purity.state = "quartz_mixed";
  const ExperimentOutcome p = run_experiment(purity);
  REQUIRE(p.reports.size() == 1);
  CHECK_THAT(p.reports[0].oracle, WithinAbs(0.6682, 1e-12));
  CHECK(p.reports[0].abs_error <= 0.05);

  ExperimentConfig witness = preset(Experiment::witness_sweep, "w");
  witness.state = "triplet";
  const ExperimentOutcome w = run_experiment(witness);
  bool has_ppt = false;
  for (const auto& [key, value] : w.manifest) {
    if (key == "ppt_min_eigenvalue") has_ppt = std::abs(std::stod(value) + 0.5) < 1e-12;
  }
  CHECK(has_ppt);

  ExperimentConfig fidelity = preset(Experiment::fidelity, "f");
  fidelity.psi = "D";
  fidelity.state = "quartz_mixed";
  CHECK_THAT(run_experiment(fidelity).reports[0].oracle, WithinAbs(0.79, 1e-12));

  ExperimentConfig dim = preset(Experiment::purity, "dim");
  dim.state = "H";
  dim.mean_counts = 1e-9;
  CHECK_THROWS_AS(run_experiment(dim), FitError);
}

TEST_CASE("written outputs are byte-identical across runs", "[runner]") {
  TempDir first("first");
  TempDir second("second");
  ExperimentConfig cfg = preset(Experiment::fig3d, "fig3d");
  cfg.theta_points = 7;
  write_outcome(run_experiment(cfg), first.path);
  write_outcome(run_experiment(cfg), second.path);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(first.path / "fig3d")) {
    const fs::path twin = second.path / "fig3d" / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(slurp(entry.path()) == slurp(twin));
    ++files;
  }
  CHECK(files == 3 + 2 * 7);

  const std::string curve = slurp(first.path / "fig3d" / "curve.csv");
  CHECK(curve.starts_with("theta_or_phase,oracle_value,estimate\n"));
  CHECK(slurp(first.path / "fig3d" / "report.csv").starts_with("kind,estimate,oracle,abs_error\n"));
  CHECK(slurp(first.path / "fig3d" / "counts_00_witness.csv")
            .starts_with("segment,phase_nominal_rad,counts\n"));
  const std::string manifest = slurp(first.path / "fig3d" / "manifest.txt");
  CHECK_THAT(manifest, ContainsSubstring("version=1.0.0\n"));
  CHECK_THAT(manifest, ContainsSubstring("max_concurrence_gap="));
  CHECK(curve.find('\r') == std::string::npos);
}

TEST_CASE("locked outputs", "[runner]") {
  TempDir dir("locked");
  write_outcome(run_experiment(preset(Experiment::fig4a, "fig4a")), dir.path);
  const std::string verdict = slurp(dir.path / "fig4a" / "verdict.csv");
  CHECK(verdict.starts_with("verdict,statistic,threshold,mean_outer,mean_middle\nEntangled,"));
  CHECK_THAT(slurp(dir.path / "fig4a" / "manifest.txt"), ContainsSubstring("verdict=Entangled\n"));
  CHECK(fs::exists(dir.path / "fig4a" / "counts_locked.csv"));
  CHECK_FALSE(fs::exists(dir.path / "fig4a" / "curve.csv"));
}

TEST_CASE("output directory resolution", "[runner]") {
  ExperimentConfig cfg = preset(Experiment::fig3a, "a");
  CHECK(resolve_output_dir(cfg, fs::path("cli")) == fs::path("cli"));
  cfg.output_path = "from_config";
  CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path("from_config"));
  cfg.output_path.clear();
  ::setenv(kOutputDirEnv, "from_env", 1);
  CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path("from_env"));
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path("qnet_out"));
}
