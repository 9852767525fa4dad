#pragma once

// Experiment configuration: an INI-style file of `key = value` lines.
//
// Keys before the first section are defaults shared by every section. Each
// `[section]` is one experiment named after the section and must set
// `experiment`. A file without sections but with a top-level `experiment` key
// describes a single experiment named after its type.
//
// State specs (single qubit):  H V D A R L mixed hwp:<angle> qwp:<angle>
//   dephased:<kappa> quartz_mixed ket:<json> <json matrix>
// State specs (two qubit):     HH HV VH VV singlet triplet phi+ phi- psi+ psi-
//   werner:<p> nonmax:<angle>:<+|->:<HH_VV|HV_VH> spdc:<a>:<b> <1q>*<1q>
//   ket:<json> <json matrix>
// JSON entries are numbers or [re, im] pairs. Angles are radians, or carry a
// `deg` or `pi` suffix (`22.5deg`, `0.25pi`).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/states.hpp"

namespace qnet {

/// Malformed or out-of-range configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  overlap,
  purity,
  fidelity,
  hsdist,
  witness_sweep,
  witness_locked,
  fig3a,
  fig3b,
  fig3c,
  fig3d,
  fig4a,
  fig4c,
};

std::string_view to_string(Experiment e) noexcept;
std::optional<Experiment> experiment_from_string(std::string_view name) noexcept;
bool is_figure_sweep(Experiment e) noexcept;
bool is_locked(Experiment e) noexcept;

struct ExperimentConfig {
  std::string name;
  Experiment experiment = Experiment::overlap;

  std::string state_a;
  std::string state_b;
  std::string state;
  std::string psi;
  std::vector<std::string> segment_states;

  std::size_t phase_points = 36;
  double phase_min = 0.0;
  double phase_max = 6.283185307179586;

  std::size_t theta_points = 19;
  double theta_min = 0.0;
  double theta_max = 0.7853981633974483;
  Sign sign = Sign::Plus;

  double mean_counts = 1000.0;
  std::uint64_t seed = 1;
  double epsilon = 1.0;
  double drift_sigma = 0.0;

  double threshold = 5.0;
  double lock_phase = 0.0;
  std::size_t dots_per_segment = 50;

  std::string output_path;  // empty: decided by the runner
};

struct ConfigFile {
  std::vector<ExperimentConfig> experiments;
};

/// Parses and fully validates (including every state spec).
ConfigFile parse_config(std::istream& in);

/// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& cfg);

struct ParsedState {
  DensityOp density;
  std::optional<PureState> pure;  // set when the spec names a pure state
};

/// Throws ConfigError on syntax errors and on invalid state data.
ParsedState parse_state(std::string_view spec);

/// Radians from `1.2`, `22.5deg` or `0.25pi`.
double parse_angle(std::string_view text);

}  // namespace qnet
