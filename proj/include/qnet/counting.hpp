#pragma once

// Simulated coincidence counting: Poisson shot noise on the analytic rate,
// with an optional Gaussian random walk on the true interferometer phase.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qnet/states.hpp"

namespace qnet {

struct SweepPlan {
  std::vector<double> phases;  // nominal phases, radians
  double mean_counts = 1000.0;  // expected counts per point at r = 1
  std::uint64_t seed = 0;
  double drift_sigma = 0.0;  // random-walk step per dot, radians
  double epsilon = 1.0;      // HOM distinguishability
};

struct CountRecord {
  double phase_nominal;
  std::int64_t counts;
};

struct SegmentRecord {
  std::size_t segment;
  CountRecord record;
};

struct LockedRunPlan {
  double lock_phase = 0.0;
  std::vector<DensityOp> segment_states;
  std::size_t dots_per_segment = 50;
  double mean_counts = 1000.0;
  std::uint64_t seed = 0;
  double drift_sigma = 0.0;
  double epsilon = 1.0;
};

/// `count` phases evenly spaced over [lo, hi), or over [lo, hi] when `inclusive`.
std::vector<double> phase_grid(std::size_t count, double lo, double hi, bool inclusive = false);

void validate(const SweepPlan& plan);
void validate(const LockedRunPlan& plan);

/// Accumulated drift offsets d_0 = 0, d_i = d_{i-1} + sigma * z_i, where z_i
/// is drawn from the substream of dot i.
std::vector<double> drift_offsets(std::uint64_t seed, std::size_t dots, double sigma);

/// Counts for one dot from its own substream, given the true phase.
std::int64_t sample_counts(const DensityOp& rho_ab, double true_phase, double mean_counts,
                           double epsilon, std::uint64_t seed, std::size_t dot_index);

std::vector<CountRecord> simulate_sweep(const DensityOp& rho_ab, const SweepPlan& plan);

std::vector<SegmentRecord> simulate_locked_run(const LockedRunPlan& plan);

/// CSV with header `segment,phase_nominal_rad,counts` and LF line endings.
void write_counts_csv(std::ostream& out, const std::vector<SegmentRecord>& rows);
void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& sweep);

}  // namespace qnet
