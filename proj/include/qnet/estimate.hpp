#pragma once

// Visibility recovery from count data and the state functionals built on it,
// together with exact matrix oracles for each estimated quantity.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/counting.hpp"
#include "qnet/states.hpp"

namespace qnet {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reference fringe is too weak to fix the sign of another fringe.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A locked run does not have the three-segment shape the verdict needs.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit of counts to A + B cos(phi) + C sin(phi).
struct FitResult {
  double offset_a;
  double cos_b;
  double sin_c;
  /// sqrt(B^2 + C^2) / A, positive when the fitted fringe phase atan2(C, B)
  /// lies within pi/2 of the nominal phase origin.
  double visibility_signed;
  double rms_residual;

  [[nodiscard]] double visibility_magnitude() const noexcept;
  [[nodiscard]] double fringe_phase() const noexcept;
};

/// Needs at least 4 records covering at least 3 phases distinct modulo 2 pi.
FitResult fit_interference(std::span<const CountRecord> records);

/// Same fit on real-valued samples (e.g. analytic rates).
FitResult fit_interference(std::span<const double> phases, std::span<const double> values);

inline constexpr double kMinReferenceVisibility = 0.1;

/// |v_target| signed by comparing fringe phases: + when within pi/2 of the
/// reference fringe (a known v = +1 state), - otherwise.
double signed_visibility(const FitResult& target, const FitResult& reference);

enum class Functional { Overlap, Purity, Fidelity, HSDistance, WitnessValue, Concurrence };
std::string_view to_string(Functional kind) noexcept;

/// One simulated sweep behind an estimate.
struct SubRun {
  std::string label;
  std::uint64_t seed;
  std::vector<CountRecord> records;
  FitResult fit;
};

struct FunctionalReport {
  Functional kind;
  double estimate;
  double oracle;
  double abs_error;
  std::vector<SubRun> runs;  // includes the |HH> sign reference
};

// Exact values.
double overlap_oracle(const DensityOp& rho_a, const DensityOp& rho_b);
double fidelity_oracle(const PureState& psi, const DensityOp& rho);
double hs_distance_oracle(const DensityOp& rho_a, const DensityOp& rho_b);
double oracle_ppt_min_eigenvalue(const DensityOp& rho_ab);
double oracle_wootters_concurrence(const DensityOp& rho_ab);

/// Sweep of |H>|H> used to fix the sign of every other fringe in an estimate.
SubRun reference_run(const SweepPlan& plan);

/// Sweep and fit of a two-qubit state under `seed`.
SubRun measure(std::string label, const DensityOp& rho_ab, const SweepPlan& plan,
               std::uint64_t seed);

FunctionalReport estimate_overlap(const DensityOp& rho_a, const DensityOp& rho_b,
                                  const SweepPlan& plan);
FunctionalReport estimate_purity(const DensityOp& rho, const SweepPlan& plan);
FunctionalReport estimate_fidelity(const PureState& psi, const DensityOp& rho,
                                   const SweepPlan& plan);
/// Half of (v_aa + v_bb - 2 v_ab) from three sweeps. Self-sweep seeds depend
/// on the state, so swapping the arguments reproduces the estimate exactly.
FunctionalReport estimate_hs_distance(const DensityOp& rho_a, const DensityOp& rho_b,
                                      const SweepPlan& plan);
FunctionalReport estimate_witness(const DensityOp& rho_ab, const SweepPlan& plan);

enum class ConcurrenceFamily { HV_VH, Werner };

/// |v| for cos|HV> +/- sin|VH> states; max(0, -v) for Werner states.
/// Membership in the family is the caller's claim.
double concurrence_from_visibility(double v, ConcurrenceFamily family);

FunctionalReport estimate_concurrence(const DensityOp& rho_ab, ConcurrenceFamily family,
                                      const SweepPlan& plan);

enum class Verdict { Entangled, Inconclusive };
std::string_view to_string(Verdict verdict) noexcept;

struct WitnessVerdict {
  Verdict verdict;
  double statistic;  // |mean(middle) - mean(outer)| / pooled standard deviation
  double threshold;
  double mean_outer;
  double mean_middle;
};

inline constexpr double kDefaultWitnessThreshold = 5.0;

/// Reads a three-segment locked run whose middle segment is a product
/// reference. Entangled needs the separation to exceed `threshold` and the
/// outer segments to sit on the opposite side of the fringe from the
/// reference (below it at a lock phase of 0, above it at pi).
WitnessVerdict witness_verdict(std::span<const SegmentRecord> run,
                               double threshold = kDefaultWitnessThreshold);

/// `key=value` lines.
std::string to_key_value(const FunctionalReport& report);
std::string to_key_value(const WitnessVerdict& verdict);

inline constexpr std::string_view kReportCsvHeader = "kind,estimate,oracle,abs_error";
std::string to_csv_row(const FunctionalReport& report);

inline constexpr std::string_view kVerdictCsvHeader =
    "verdict,statistic,threshold,mean_outer,mean_middle";
std::string to_csv_row(const WitnessVerdict& verdict);

}  // namespace qnet
