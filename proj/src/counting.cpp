#include "qnet/counting.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qnet/network.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {

void require_common(double mean_counts, double drift_sigma, double epsilon) {
  if (!(mean_counts > 0.0) || !std::isfinite(mean_counts)) {
    throw std::invalid_argument("mean_counts must be positive and finite");
  }
  if (!(drift_sigma >= 0.0) || !std::isfinite(drift_sigma)) {
    throw std::invalid_argument("drift_sigma must be non-negative and finite");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

}  // namespace

std::vector<double> phase_grid(std::size_t count, double lo, double hi, bool inclusive) {
  std::vector<double> grid(count);
  if (count == 0) return grid;
  const double intervals = inclusive && count > 1 ? static_cast<double>(count - 1)
                                                  : static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / intervals;
  }
  return grid;
}

void validate(const SweepPlan& plan) {
  if (plan.phases.empty()) throw std::invalid_argument("sweep needs at least one phase");
  for (const double phi : plan.phases) {
    if (!std::isfinite(phi)) throw std::invalid_argument("sweep phases must be finite");
  }
  require_common(plan.mean_counts, plan.drift_sigma, plan.epsilon);
}

void validate(const LockedRunPlan& plan) {
  if (plan.segment_states.size() != 3) {
    throw std::invalid_argument("locked run needs exactly 3 segments");
  }
  for (const DensityOp& rho : plan.segment_states) {
    if (rho.dim() != 4) throw std::invalid_argument("locked-run states must be two-qubit");
  }
  if (plan.dots_per_segment == 0) throw std::invalid_argument("dots_per_segment must be >= 1");
  if (!std::isfinite(plan.lock_phase)) throw std::invalid_argument("lock_phase must be finite");
  require_common(plan.mean_counts, plan.drift_sigma, plan.epsilon);
}

std::vector<double> drift_offsets(std::uint64_t seed, std::size_t dots, double sigma) {
  std::vector<double> offsets(dots, 0.0);
  if (sigma == 0.0) return offsets;
  const std::uint64_t stream = rng::derive_seed(seed, "drift");
  for (std::size_t i = 1; i < dots; ++i) {
    rng::Engine engine = rng::make_engine(rng::derive_seed(stream, i));
    offsets[i] = offsets[i - 1] + sigma * rng::standard_normal(engine);
  }
  return offsets;
}

std::int64_t sample_counts(const DensityOp& rho_ab, double true_phase, double mean_counts,
                           double epsilon, std::uint64_t seed, std::size_t dot_index) {
  const double rate = ideal_coincidence_rate(rho_ab, OpticalConfig{true_phase, epsilon});
  rng::Engine engine =
      rng::make_engine(rng::derive_seed(rng::derive_seed(seed, "counts"), dot_index));
  return rng::poisson(engine, mean_counts * std::max(rate, 0.0));
}

std::vector<CountRecord> simulate_sweep(const DensityOp& rho_ab, const SweepPlan& plan) {
  validate(plan);
  const std::vector<double> drift = drift_offsets(plan.seed, plan.phases.size(), plan.drift_sigma);
  std::vector<CountRecord> records(plan.phases.size());
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    const double phi = plan.phases[i];
    records[i] = CountRecord{
        phi, sample_counts(rho_ab, phi + drift[i], plan.mean_counts, plan.epsilon, plan.seed, i)};
  }
  return records;
}

std::vector<SegmentRecord> simulate_locked_run(const LockedRunPlan& plan) {
  validate(plan);
  const std::size_t total = plan.segment_states.size() * plan.dots_per_segment;
  const std::vector<double> drift = drift_offsets(plan.seed, total, plan.drift_sigma);
  std::vector<SegmentRecord> rows;
  rows.reserve(total);
  for (std::size_t dot = 0; dot < total; ++dot) {
    const std::size_t segment = dot / plan.dots_per_segment;
    const std::int64_t n = sample_counts(plan.segment_states[segment], plan.lock_phase + drift[dot],
                                         plan.mean_counts, plan.epsilon, plan.seed, dot);
    rows.push_back(SegmentRecord{segment, CountRecord{plan.lock_phase, n}});
  }
  return rows;
}

void write_counts_csv(std::ostream& out, const std::vector<SegmentRecord>& rows) {
  out << "segment,phase_nominal_rad,counts\n";
  for (const SegmentRecord& row : rows) {
    out << fmt::format("{},{},{}\n", row.segment, row.record.phase_nominal, row.record.counts);
  }
}

void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& sweep) {
  out << "segment,phase_nominal_rad,counts\n";
  for (const CountRecord& r : sweep) out << fmt::format("0,{},{}\n", r.phase_nominal, r.counts);
}

}  // namespace qnet
