#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qnet/counting.hpp"
#include "qnet/network.hpp"

using namespace qnet;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;

namespace {

DensityOp hh() { return product(ket_h().density(), ket_h().density()); }
DensityOp hv() { return product(ket_h().density(), ket_v().density()); }

double segment_mean(const std::vector<SegmentRecord>& rows, std::size_t segment) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const SegmentRecord& row : rows) {
    if (row.segment != segment) continue;
    sum += static_cast<double>(row.record.counts);
    ++n;
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("phase_grid", "[counting]") {
  const std::vector<double> g = phase_grid(4, 0.0, 2 * pi);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 0.0);
  CHECK_THAT(g[1], WithinAbs(pi / 2, 1e-15));
  CHECK_THAT(g[3], WithinAbs(3 * pi / 2, 1e-15));
  const std::vector<double> closed = phase_grid(19, 0.0, pi / 4, true);
  CHECK(closed.front() == 0.0);
  CHECK(closed.back() == pi / 4);
  CHECK(phase_grid(0, 0.0, 1.0).empty());
}

TEST_CASE("sweep of a zero-visibility state stays at the mean level", "[counting]") {
  const DensityOp rho = hv();
  REQUIRE(ideal_visibility(rho) == 0.0);
  SweepPlan plan{phase_grid(36, 0.0, 2 * pi), 1e6, 5};
  const std::vector<CountRecord> records = simulate_sweep(rho, plan);
  REQUIRE(records.size() == 36);
  double mean = 0.0;
  for (const CountRecord& r : records) mean += static_cast<double>(r.counts) / plan.mean_counts;
  mean /= 36.0;
  CHECK_THAT(mean, WithinAbs(1.0, 0.005));
}

TEST_CASE("sweeps are deterministic in the seed", "[counting]") {
  SweepPlan plan{phase_grid(36, 0.0, 2 * pi), 1000.0, 77, 0.05};
  const DensityOp rho = random_density(3, 4, 2);
  const std::vector<CountRecord> a = simulate_sweep(rho, plan);
  const std::vector<CountRecord> b = simulate_sweep(rho, plan);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].counts == b[i].counts);
    CHECK(a[i].phase_nominal == b[i].phase_nominal);
  }
  plan.seed = 78;
  const std::vector<CountRecord> c = simulate_sweep(rho, plan);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].counts != c[i].counts;
  CHECK(differs);
}

TEST_CASE("zero rate gives zero counts", "[counting]") {
  std::int64_t total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SweepPlan plan{{pi}, 1000.0, seed};
    for (const CountRecord& r : simulate_sweep(hh(), plan)) total += r.counts;
  }
  CHECK(total == 0);
}

TEST_CASE("empirical rates converge to the analytic fringe", "[counting]") {
  const double n0 = 1e6;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const DensityOp rho = random_density(100 + s, 4, 1 + s % 4);
    SweepPlan plan{phase_grid(36, 0.0, 2 * pi), n0, 900 + s, 0.0, 0.8};
    for (const CountRecord& r : simulate_sweep(rho, plan)) {
      const double expected = n0 * ideal_coincidence_rate(rho, {r.phase_nominal, 0.8});
      const double se = std::sqrt(std::max(expected, 1.0));
      CHECK(std::abs(static_cast<double>(r.counts) - expected) <= 5 * se);
    }
  }
}

TEST_CASE("pooled mean over seeds", "[counting]") {
  const double n0 = 1000.0;
  for (const double phase : {0.0, 1.0, 2.5}) {
    const DensityOp rho = make_werner(0.6);
    const double expected = n0 * ideal_coincidence_rate(rho, {phase, 1.0});
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      SweepPlan plan{{phase}, n0, seed};
      sum += static_cast<double>(simulate_sweep(rho, plan).front().counts);
    }
    const double pooled_se = std::sqrt(expected / 50.0);
    CHECK(std::abs(sum / 50.0 - expected) <= 3 * pooled_se);
  }
}

TEST_CASE("drift moves only the hidden phase", "[counting]") {
  const std::vector<double> phases = phase_grid(36, 0.0, 2 * pi);
  SweepPlan still{phases, 1e5, 11};
  SweepPlan drifting = still;
  drifting.drift_sigma = 0.2;
  const std::vector<CountRecord> a = simulate_sweep(hh(), still);
  const std::vector<CountRecord> b = simulate_sweep(hh(), drifting);
  bool differs = false;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    CHECK(a[i].phase_nominal == phases[i]);
    CHECK(b[i].phase_nominal == phases[i]);
    differs = differs || a[i].counts != b[i].counts;
  }
  CHECK(differs);

  const std::vector<double> d = drift_offsets(11, 36, 0.2);
  CHECK(d.front() == 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(b[i].counts == sample_counts(hh(), phases[i] + d[i], 1e5, 1.0, 11, i));
  }
  for (const double x : drift_offsets(11, 36, 0.0)) CHECK(x == 0.0);
}

TEST_CASE("per-point substreams are order independent", "[counting]") {
  const DensityOp rho = random_density(8, 4, 3);
  SweepPlan plan{phase_grid(24, -pi, pi), 5000.0, 2024};
  const std::vector<CountRecord> records = simulate_sweep(rho, plan);
  for (std::size_t k = records.size(); k-- > 0;) {
    CHECK(records[k].counts == sample_counts(rho, plan.phases[k], 5000.0, 1.0, 2024, k));
  }
}

TEST_CASE("locked runs", "[counting]") {
  const DensityOp singlet = psi_minus().density();
  const DensityOp triplet = psi_plus().density();

  LockedRunPlan flip{0.0, {singlet, hh(), singlet}, 50, 1000.0, 3};
  const std::vector<SegmentRecord> rows = simulate_locked_run(flip);
  REQUIRE(rows.size() == 150);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].segment == i / 50);
    CHECK(rows[i].record.phase_nominal == 0.0);
  }
  CHECK(segment_mean(rows, 0) == 0.0);
  CHECK(segment_mean(rows, 2) == 0.0);
  // 50 dots of Poisson(2000): standard error about 6.3.
  CHECK_THAT(segment_mean(rows, 1), WithinAbs(2000.0, 35.0));

  LockedRunPlan steady{0.0, {triplet, hh(), triplet}, 50, 1000.0, 3};
  const std::vector<SegmentRecord> flat = simulate_locked_run(steady);
  for (std::size_t s = 0; s < 3; ++s) CHECK_THAT(segment_mean(flat, s), WithinAbs(2000.0, 35.0));

  LockedRunPlan bad = flip;
  bad.segment_states.pop_back();
  CHECK_THROWS_AS(simulate_locked_run(bad), std::invalid_argument);
  bad = flip;
  bad.dots_per_segment = 0;
  CHECK_THROWS_AS(simulate_locked_run(bad), std::invalid_argument);
}

TEST_CASE("plan validation", "[counting]") {
  CHECK_THROWS_AS(simulate_sweep(hh(), SweepPlan{}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_sweep(hh(), SweepPlan{{0.0}, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_sweep(hh(), SweepPlan{{0.0}, 10.0, 1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_sweep(hh(), SweepPlan{{0.0}, 10.0, 1, 0.0, 1.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_sweep(hh(), SweepPlan{{NAN}, 10.0}), std::invalid_argument);
}

TEST_CASE("counts CSV", "[counting]") {
  std::ostringstream sweep_csv;
  write_counts_csv(sweep_csv, std::vector<CountRecord>{{0.0, 12}, {0.5, 7}});
  CHECK(sweep_csv.str() == "segment,phase_nominal_rad,counts\n0,0,12\n0,0.5,7\n");

  std::ostringstream locked_csv;
  write_counts_csv(locked_csv, std::vector<SegmentRecord>{{0, {0.0, 3}}, {2, {0.0, 1999}}});
  CHECK(locked_csv.str() == "segment,phase_nominal_rad,counts\n0,0,3\n2,0,1999\n");

  // Phases round-trip through the text form.
  const std::vector<double> phases = phase_grid(36, 0.0, 2 * pi);
  std::vector<CountRecord> records;
  for (const double phi : phases) records.push_back({phi, 1});
  std::ostringstream out;
  write_counts_csv(out, records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  for (const double phi : phases) {
    REQUIRE(std::getline(in, line));
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    CHECK(std::stod(line.substr(first + 1, second - first - 1)) == phi);
  }
  CHECK(out.str().find('\r') == std::string::npos);
}
