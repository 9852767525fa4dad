#include "qnet/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>

#include "qnet/counting.hpp"

namespace qnet {

namespace {

using std::numbers::pi;

constexpr std::array<std::pair<Experiment, std::string_view>, 12> kExperimentNames{{
    {Experiment::overlap, "overlap"},
    {Experiment::purity, "purity"},
    {Experiment::fidelity, "fidelity"},
    {Experiment::hsdist, "hsdist"},
    {Experiment::witness_sweep, "witness_sweep"},
    {Experiment::witness_locked, "witness_locked"},
    {Experiment::fig3a, "fig3a"},
    {Experiment::fig3b, "fig3b"},
    {Experiment::fig3c, "fig3c"},
    {Experiment::fig3d, "fig3d"},
    {Experiment::fig4a, "fig4a"},
    {Experiment::fig4c, "fig4c"},
}};

const std::set<std::string, std::less<>> kKnownKeys{
    "experiment",  "state_a",      "state_b",   "state",      "psi",
    "segment_states", "phase_points", "phase_min", "phase_max", "theta_points",
    "theta_min",   "theta_max",    "sign",      "mean_counts", "seed",
    "epsilon",     "drift_sigma",  "threshold", "lock_phase", "dots_per_segment",
    "output_path"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(fmt::format("'{}' is not a finite number", text));
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("'{}' is not a non-negative integer", text));
  }
  return value;
}

Complex json_entry(const nlohmann::json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ConfigError("matrix entries must be numbers or [re, im] pairs");
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("malformed literal '{}'", text));
  }
}

ParsedState from_pure(PureState psi) {
  DensityOp rho = psi.density();
  return ParsedState{std::move(rho), std::move(psi)};
}

ParsedState parse_matrix_literal(std::string_view text) {
  const nlohmann::json j = parse_json(text);
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError("matrix literal must be an array of rows");
  }
  const std::size_t n = j.size();
  std::vector<Complex> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) throw ConfigError("matrix literal must be square");
    for (const auto& e : row) entries.push_back(json_entry(e));
  }
  const CMatrix m(n, n, std::move(entries));
  if (auto problem = check_density(m)) throw ConfigError(*problem);
  return ParsedState{DensityOp(m), std::nullopt};
}

ParsedState parse_ket_literal(std::string_view text) {
  const nlohmann::json j = parse_json(text);
  if (!j.is_array()) throw ConfigError("ket literal must be an array");
  std::vector<Complex> amps;
  for (const auto& e : j) amps.push_back(json_entry(e));
  return from_pure(PureState(std::move(amps)));
}

void require_args(std::string_view name, const std::vector<std::string_view>& parts,
                  std::size_t count) {
  if (parts.size() != count + 1) {
    throw ConfigError(fmt::format("state '{}' takes {} argument(s)", name, count));
  }
}

ParsedState parse_named(std::string_view spec) {
  const std::vector<std::string_view> parts = split(spec, ':');
  const std::string_view name = parts.front();
  const double r = std::numbers::sqrt2 / 2;
  const Complex i(0.0, 1.0);

  static const std::map<std::string, std::vector<Complex>, std::less<>> kKets{
      {"H", {1.0, 0.0}},
      {"V", {0.0, 1.0}},
      {"D", {r, r}},
      {"A", {r, -r}},
      {"R", {r, r * i}},
      {"L", {r, -r * i}},
      {"HH", {1.0, 0.0, 0.0, 0.0}},
      {"HV", {0.0, 1.0, 0.0, 0.0}},
      {"VH", {0.0, 0.0, 1.0, 0.0}},
      {"VV", {0.0, 0.0, 0.0, 1.0}},
  };
  if (const auto it = kKets.find(name); it != kKets.end()) {
    require_args(name, parts, 0);
    return from_pure(PureState(it->second));
  }
  if (name == "singlet" || name == "psi-") {
    require_args(name, parts, 0);
    return from_pure(psi_minus());
  }
  if (name == "triplet" || name == "psi+") {
    require_args(name, parts, 0);
    return from_pure(psi_plus());
  }
  if (name == "phi+") {
    require_args(name, parts, 0);
    return from_pure(phi_plus());
  }
  if (name == "phi-") {
    require_args(name, parts, 0);
    return from_pure(phi_minus());
  }
  if (name == "mixed") {
    require_args(name, parts, 0);
    return ParsedState{DensityOp(0.5 * CMatrix::identity(2)), std::nullopt};
  }
  if (name == "quartz_mixed") {
    require_args(name, parts, 0);
    return ParsedState{dephased_diagonal(), std::nullopt};
  }
  if (name == "hwp") {
    require_args(name, parts, 1);
    return from_pure(hwp_prepared(parse_angle(parts[1])));
  }
  if (name == "qwp") {
    require_args(name, parts, 1);
    return from_pure(apply_jones(qwp_jones(parse_angle(parts[1])), ket_h()));
  }
  if (name == "dephased") {
    require_args(name, parts, 1);
    return ParsedState{dephased_diagonal(parse_double(parts[1])), std::nullopt};
  }
  if (name == "werner") {
    require_args(name, parts, 1);
    return ParsedState{make_werner(parse_double(parts[1])), std::nullopt};
  }
  if (name == "spdc") {
    require_args(name, parts, 2);
    return from_pure(spdc_source(parse_double(parts[1]), parse_double(parts[2])));
  }
  if (name == "nonmax") {
    require_args(name, parts, 3);
    const double theta = parse_angle(parts[1]);
    Sign sign;
    if (parts[2] == "+") {
      sign = Sign::Plus;
    } else if (parts[2] == "-") {
      sign = Sign::Minus;
    } else {
      throw ConfigError("nonmax sign must be '+' or '-'");
    }
    PairBasis basis;
    if (parts[3] == "HH_VV") {
      basis = PairBasis::HH_VV;
    } else if (parts[3] == "HV_VH") {
      basis = PairBasis::HV_VH;
    } else {
      throw ConfigError("nonmax basis must be HH_VV or HV_VH");
    }
    return from_pure(nonmax_entangled(theta, sign, basis));
  }
  throw ConfigError(fmt::format("unknown state '{}'", name));
}

ParsedState parse_state_impl(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw ConfigError("empty state spec");
  if (spec.front() == '[') return parse_matrix_literal(spec);
  if (spec.starts_with("ket:")) return parse_ket_literal(spec.substr(4));
  if (const auto star = spec.find('*'); star != std::string_view::npos) {
    const ParsedState a = parse_state_impl(spec.substr(0, star));
    const ParsedState b = parse_state_impl(spec.substr(star + 1));
    if (a.density.dim() != 2 || b.density.dim() != 2) {
      throw ConfigError("product states combine two single-qubit specs");
    }
    std::optional<PureState> pure;
    if (a.pure && b.pure) {
      const CMatrix ket = kron(a.pure->ket(), b.pure->ket());
      pure = PureState({ket.entries().begin(), ket.entries().end()});
    }
    return ParsedState{product(a.density, b.density), std::move(pure)};
  }
  return parse_named(spec);
}

/// Names become directory names, so path separators and dot-only names are refused.
bool valid_name(std::string_view name) {
  if (name.empty() || name.find_first_not_of('.') == std::string_view::npos) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string field_error(const ExperimentConfig& cfg, std::string_view field,
                        std::string_view message) {
  return fmt::format("[{}] {}: {}", cfg.name, field, message);
}

void require_state(const ExperimentConfig& cfg, std::string_view field, const std::string& spec,
                   std::size_t dim, bool must_be_pure = false) {
  if (spec.empty()) throw ConfigError(field_error(cfg, field, "required for this experiment"));
  ParsedState parsed = [&] {
    try {
      return parse_state(spec);
    } catch (const ConfigError& e) {
      throw ConfigError(field_error(cfg, field, e.what()));
    }
  }();
  if (parsed.density.dim() != dim) {
    throw ConfigError(field_error(
        cfg, field, dim == 2 ? "expected a single-qubit state" : "expected a two-qubit state"));
  }
  if (must_be_pure && !parsed.pure) {
    throw ConfigError(field_error(cfg, field, "expected a pure state"));
  }
}

void set_field(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "experiment") {
      const auto e = experiment_from_string(trim(value));
      if (!e) throw ConfigError(fmt::format("unknown experiment '{}'", value));
      cfg.experiment = *e;
    } else if (key == "state_a") {
      cfg.state_a = value;
    } else if (key == "state_b") {
      cfg.state_b = value;
    } else if (key == "state") {
      cfg.state = value;
    } else if (key == "psi") {
      cfg.psi = value;
    } else if (key == "segment_states") {
      cfg.segment_states.clear();
      for (const std::string_view part : split(value, ';')) cfg.segment_states.emplace_back(part);
    } else if (key == "phase_points") {
      cfg.phase_points = parse_uint(value);
    } else if (key == "phase_min") {
      cfg.phase_min = parse_angle(value);
    } else if (key == "phase_max") {
      cfg.phase_max = parse_angle(value);
    } else if (key == "theta_points") {
      cfg.theta_points = parse_uint(value);
    } else if (key == "theta_min") {
      cfg.theta_min = parse_angle(value);
    } else if (key == "theta_max") {
      cfg.theta_max = parse_angle(value);
    } else if (key == "sign") {
      const std::string_view s = trim(value);
      if (s == "+") {
        cfg.sign = Sign::Plus;
      } else if (s == "-") {
        cfg.sign = Sign::Minus;
      } else {
        throw ConfigError("must be '+' or '-'");
      }
    } else if (key == "mean_counts") {
      cfg.mean_counts = parse_double(value);
    } else if (key == "seed") {
      cfg.seed = parse_uint(value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value);
    } else if (key == "drift_sigma") {
      cfg.drift_sigma = parse_double(value);
    } else if (key == "threshold") {
      cfg.threshold = parse_double(value);
    } else if (key == "lock_phase") {
      cfg.lock_phase = parse_angle(value);
    } else if (key == "dots_per_segment") {
      cfg.dots_per_segment = parse_uint(value);
    } else if (key == "output_path") {
      cfg.output_path = std::string(trim(value));
    } else {
      throw ConfigError("unknown key");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(field_error(cfg, key, e.what()));
  }
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  for (const auto& [value, name] : kExperimentNames) {
    if (value == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> experiment_from_string(std::string_view name) noexcept {
  for (const auto& [value, text] : kExperimentNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

bool is_figure_sweep(Experiment e) noexcept {
  return e == Experiment::fig3a || e == Experiment::fig3b || e == Experiment::fig3c ||
         e == Experiment::fig3d;
}

bool is_locked(Experiment e) noexcept {
  return e == Experiment::witness_locked || e == Experiment::fig4a || e == Experiment::fig4c;
}

double parse_angle(std::string_view text) {
  text = trim(text);
  if (text.ends_with("deg")) return parse_double(text.substr(0, text.size() - 3)) * pi / 180.0;
  if (text.ends_with("pi")) {
    const std::string_view factor = trim(text.substr(0, text.size() - 2));
    return (factor.empty() ? 1.0 : parse_double(factor)) * pi;
  }
  return parse_double(text);
}

ParsedState parse_state(std::string_view spec) {
  try {
    return parse_state_impl(spec);
  } catch (const StateError& e) {
    throw ConfigError(fmt::format("state '{}': {}", trim(spec), e.what()));
  } catch (const ContractViolation& e) {
    throw ConfigError(fmt::format("state '{}': {}", trim(spec), e.what()));
  } catch (const DimensionError& e) {
    throw ConfigError(fmt::format("state '{}': {}", trim(spec), e.what()));
  }
}

void validate(const ExperimentConfig& cfg) {
  const auto fail = [&](std::string_view field, std::string_view message) {
    throw ConfigError(field_error(cfg, field, message));
  };

  if (!(cfg.mean_counts > 0.0)) fail("mean_counts", "must be positive");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) fail("epsilon", "must lie in [0, 1]");
  if (!(cfg.drift_sigma >= 0.0)) fail("drift_sigma", "must be non-negative");

  if (is_locked(cfg.experiment)) {
    if (cfg.dots_per_segment == 0) fail("dots_per_segment", "must be at least 1");
    if (!(cfg.threshold > 0.0)) fail("threshold", "must be positive");
    if (std::abs(std::cos(cfg.lock_phase)) < 1e-9) {
      fail("lock_phase", "must not sit at a fringe node (cos = 0)");
    }
  } else {
    if (cfg.phase_points < 4) fail("phase_points", "a sweep needs at least 4 phases");
    if (!(cfg.phase_max > cfg.phase_min)) fail("phase_max", "must exceed phase_min");
    const std::vector<double> grid = phase_grid(cfg.phase_points, cfg.phase_min, cfg.phase_max);
    std::vector<double> reduced;
    for (const double phi : grid) {
      const double w = std::remainder(phi, 2.0 * pi);
      if (std::none_of(reduced.begin(), reduced.end(),
                       [&](double x) { return std::abs(std::remainder(x - w, 2.0 * pi)) < 1e-12; })) {
        reduced.push_back(w);
      }
    }
    if (reduced.size() < 3) fail("phase_points", "grid covers fewer than 3 distinct phases");
  }

  if (is_figure_sweep(cfg.experiment)) {
    if (cfg.theta_points < 1) fail("theta_points", "must be at least 1");
    if (cfg.theta_max < cfg.theta_min) fail("theta_max", "must not be below theta_min");
  }

  switch (cfg.experiment) {
    case Experiment::overlap:
    case Experiment::hsdist:
      require_state(cfg, "state_a", cfg.state_a, 2);
      require_state(cfg, "state_b", cfg.state_b, 2);
      break;
    case Experiment::purity:
      require_state(cfg, "state", cfg.state, 2);
      break;
    case Experiment::fidelity:
      require_state(cfg, "psi", cfg.psi, 2, true);
      require_state(cfg, "state", cfg.state, 2);
      break;
    case Experiment::witness_sweep:
      require_state(cfg, "state", cfg.state, 4);
      break;
    case Experiment::fig3b:
      if (!cfg.state_b.empty()) require_state(cfg, "state_b", cfg.state_b, 2);
      break;
    case Experiment::witness_locked:
    case Experiment::fig4a:
    case Experiment::fig4c:
      if (cfg.experiment == Experiment::witness_locked || !cfg.segment_states.empty()) {
        if (cfg.segment_states.size() != 3) fail("segment_states", "exactly 3 states required");
        for (const std::string& spec : cfg.segment_states) {
          require_state(cfg, "segment_states", spec, 4);
        }
      }
      break;
    case Experiment::fig3a:
    case Experiment::fig3c:
    case Experiment::fig3d:
      break;
  }
}

ConfigFile parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }

  std::vector<std::pair<std::string, std::string>> defaults;
  std::vector<std::pair<std::string, const pt::ptree*>> sections;
  for (const auto& [key, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      defaults.emplace_back(key, node.data());
    } else {
      sections.emplace_back(key, &node);
    }
  }

  const auto apply = [](ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (!kKnownKeys.contains(key)) throw ConfigError(field_error(cfg, key, "unknown key"));
    set_field(cfg, key, value);
  };

  ConfigFile file;
  if (sections.empty()) {
    ExperimentConfig cfg;
    const auto it = std::find_if(defaults.begin(), defaults.end(),
                                 [](const auto& kv) { return kv.first == "experiment"; });
    if (it == defaults.end()) throw ConfigError("config defines no experiment");
    cfg.name = std::string(trim(it->second));
    for (const auto& [key, value] : defaults) apply(cfg, key, value);
    file.experiments.push_back(std::move(cfg));
  } else {
    for (const auto& [name, node] : sections) {
      ExperimentConfig cfg;
      cfg.name = name;
      for (const auto& [key, value] : defaults) apply(cfg, key, value);
      bool has_experiment = std::any_of(defaults.begin(), defaults.end(),
                                        [](const auto& kv) { return kv.first == "experiment"; });
      for (const auto& [key, child] : *node) {
        apply(cfg, key, child.data());
        has_experiment = has_experiment || key == "experiment";
      }
      if (!has_experiment) throw ConfigError(field_error(cfg, "experiment", "missing"));
      file.experiments.push_back(std::move(cfg));
    }
  }

  std::set<std::string> names;
  for (const ExperimentConfig& cfg : file.experiments) {
    if (!valid_name(cfg.name)) {
      throw ConfigError(fmt::format(
          "experiment name '{}' must use only letters, digits, '_', '-' and '.'", cfg.name));
    }
    if (!names.insert(cfg.name).second) {
      throw ConfigError(fmt::format("duplicate experiment name '{}'", cfg.name));
    }
    validate(cfg);
  }
  return file;
}

}  // namespace qnet
