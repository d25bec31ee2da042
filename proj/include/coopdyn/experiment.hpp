#pragma once

// Experiment configuration: parsing (YAML, hence also JSON), validation,
// canonical serialisation, the bundled figure configurations and desk scaling.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "coopdyn/abm.hpp"
#include "coopdyn/fpe.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/stationary.hpp"

namespace coopdyn {

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

enum class Mode { abm, fpe, meanfield, stationary, compare, verify };

inline constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::abm: return "abm";
    case Mode::fpe: return "fpe";
    case Mode::meanfield: return "meanfield";
    case Mode::stationary: return "stationary";
    case Mode::compare: return "compare";
    case Mode::verify: return "verify";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::abm, Mode::fpe, Mode::meanfield, Mode::stationary, Mode::compare, Mode::verify})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

struct AbmBlock {
  std::size_t n_agents = 200;
  std::uint64_t episodes = 200000;
  std::size_t replicates = 5;
  std::size_t n_snapshots = 100;
  std::uint64_t snapshot_every = 0;
  friend bool operator==(const AbmBlock&, const AbmBlock&) = default;
};

struct FpeBlock {
  double T = 1000.0;
  double cfl_safety = 0.5;
  bool drift_only = false;
  std::size_t n_snapshots = 100;
  /// Also run the particle SDE and write it under particles/.
  bool particles = false;
  std::size_t n_particles = 100000;
  double particle_dt = 0.5;
  friend bool operator==(const FpeBlock&, const FpeBlock&) = default;
};

struct MeanfieldBlock {
  double T = 1000.0;
  double dt = 0.1;
  std::size_t n_snapshots = 100;
  friend bool operator==(const MeanfieldBlock&, const MeanfieldBlock&) = default;
};

struct StationaryBlock {
  std::vector<double> epsilon_schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double damping = 0.5;
  std::size_t max_iters = 20000;
  double tol_w1 = 1e-8;
  friend bool operator==(const StationaryBlock&, const StationaryBlock&) = default;
};

struct CompareBlock {
  AbmBlock abm{};
  double cfl_safety = 0.5;
  bool meanfield = true;
  /// Reuse the ABM run stored in this directory instead of simulating.
  std::string abm_dir;
  friend bool operator==(const CompareBlock&, const CompareBlock&) = default;
};

struct VerifyBlock {
  friend bool operator==(const VerifyBlock&, const VerifyBlock&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Mode mode = Mode::abm;
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  PartnerRule rule = PartnerRule::OFT;
  PayoffParams payoff{};
  InitSpec init{};
  Grid grid{200};
  /// Reported time = simulation time * time_scale.
  double time_scale = 1.0;

  std::optional<AbmBlock> abm;
  std::optional<FpeBlock> fpe;
  std::optional<MeanfieldBlock> meanfield;
  std::optional<StationaryBlock> stationary;
  std::optional<CompareBlock> compare;
  std::optional<VerifyBlock> verify;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  std::size_t populated_blocks() const {
    return abm.has_value() + fpe.has_value() + meanfield.has_value() + stationary.has_value() + compare.has_value() +
           verify.has_value();
  }

  bool block_matches_mode() const {
    switch (mode) {
      case Mode::abm: return abm.has_value();
      case Mode::fpe: return fpe.has_value();
      case Mode::meanfield: return meanfield.has_value();
      case Mode::stationary: return stationary.has_value();
      case Mode::compare: return compare.has_value();
      case Mode::verify: return verify.has_value();
    }
    return false;
  }

  SimConfig sim_config(const AbmBlock& b) const {
    SimConfig s;
    s.n_agents = b.n_agents;
    s.episodes = b.episodes;
    s.rule = rule;
    s.payoff = payoff;
    s.init = init;
    s.seed = seed;
    s.snapshot_every = b.snapshot_every;
    s.n_snapshots = b.n_snapshots;
    s.grid = grid;
    return s;
  }

  FpeConfig fpe_config(const FpeBlock& b) const {
    FpeConfig f;
    f.rule = rule;
    f.payoff = payoff;
    f.init = init;
    f.grid = grid;
    f.T = b.T;
    f.cfl_safety = b.cfl_safety;
    f.drift_only = b.drift_only;
    f.n_snapshots = b.n_snapshots;
    return f;
  }

  StationaryConfig stationary_config(const StationaryBlock& b) const {
    StationaryConfig s;
    s.rule = rule;
    s.payoff = payoff;
    s.grid = grid;
    s.init = init;
    s.epsilon_schedule = b.epsilon_schedule;
    s.damping = b.damping;
    s.max_iters = b.max_iters;
    s.tol_w1 = b.tol_w1;
    return s;
  }

  /// Throws ConfigError for any inconsistency, including those the
  /// individual pipelines would only detect when started.
  void validate() const {
    auto wrap = [](auto&& f) {
      try {
        f();
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    };
    if (populated_blocks() != 1 || !block_matches_mode())
      throw ConfigError("exactly one mode block, named '" + std::string(to_string(mode)) + "', must be present");
    if (!(time_scale > 0.0) || !std::isfinite(time_scale)) throw ConfigError("time_scale must be positive");
    if (grid.n_cells() < 2) throw ConfigError("grid needs at least two cells");
    wrap([&] {
      payoff.validate();
      init.validate();
    });
    if (abm) {
      if (abm->replicates < 1) throw ConfigError("abm.replicates must be >= 1");
      wrap([&] { sim_config(*abm).validate(); });
    }
    if (fpe) {
      wrap([&] { fpe_config(*fpe).validate(); });
      if (fpe->particles && (fpe->n_particles < 100 || !(fpe->particle_dt > 0.0)))
        throw ConfigError("fpe particles need n_particles >= 100 and particle_dt > 0");
      if (fpe->particles && payoff.H != 2) throw ConfigError("particle SDE requires H = 2");
    }
    if (meanfield) {
      if (!(meanfield->T > 0.0) || !(meanfield->dt > 0.0)) throw ConfigError("meanfield T and dt must be positive");
      if (is_selective(rule) && payoff.H != 2) throw ConfigError("OFT/ROFT mean-field dynamics require H = 2");
    }
    if (stationary) wrap([&] { stationary_config(*stationary).validate(); });
    if (compare) {
      if (compare->abm.replicates < 1) throw ConfigError("compare.replicates must be >= 1");
      wrap([&] { sim_config(compare->abm).validate(); });
      if (payoff.H != 2) throw ConfigError("compare mode requires H = 2");
      if (!(compare->cfl_safety > 0.0 && compare->cfl_safety <= 1.0))
        throw ConfigError("compare.cfl_safety must lie in (0, 1]");
    }
  }
};

// ---------------------------------------------------------------------------
// Serialisation
// ---------------------------------------------------------------------------

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json init_to_json(const InitSpec& s) {
  nlohmann::ordered_json j;
  switch (s.kind) {
    case InitSpec::Kind::Beta:
      j["kind"] = "beta";
      j["a"] = s.a;
      j["b"] = s.b;
      break;
    case InitSpec::Kind::Uniform: j["kind"] = "uniform"; break;
    case InitSpec::Kind::Dirac:
      j["kind"] = "dirac";
      j["p"] = s.p;
      break;
  }
  return j;
}

inline nlohmann::ordered_json abm_to_json(const AbmBlock& b) {
  return {{"n_agents", b.n_agents},       {"episodes", b.episodes},
          {"replicates", b.replicates},   {"n_snapshots", b.n_snapshots},
          {"snapshot_every", b.snapshot_every}};
}

/// Canonical JSON form; parse_config(to_json(c).dump()) == c.
inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["mode"] = std::string(to_string(c.mode));
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["rule"] = std::string(to_string(c.rule));
  j["payoff"] = {{"b", c.payoff.b}, {"c", c.payoff.c}, {"H", c.payoff.H}, {"alpha", c.payoff.alpha},
                 {"beta", c.payoff.beta}};
  j["init"] = init_to_json(c.init);
  j["grid"] = {{"n_cells", c.grid.n_cells()}};
  j["time_scale"] = c.time_scale;
  if (c.abm) j["abm"] = abm_to_json(*c.abm);
  if (c.fpe)
    j["fpe"] = {{"T", c.fpe->T},
                {"cfl_safety", c.fpe->cfl_safety},
                {"drift_only", c.fpe->drift_only},
                {"n_snapshots", c.fpe->n_snapshots},
                {"particles", c.fpe->particles},
                {"n_particles", c.fpe->n_particles},
                {"particle_dt", c.fpe->particle_dt}};
  if (c.meanfield)
    j["meanfield"] = {{"T", c.meanfield->T}, {"dt", c.meanfield->dt}, {"n_snapshots", c.meanfield->n_snapshots}};
  if (c.stationary)
    j["stationary"] = {{"epsilon_schedule", c.stationary->epsilon_schedule},
                       {"damping", c.stationary->damping},
                       {"max_iters", c.stationary->max_iters},
                       {"tol_w1", c.stationary->tol_w1}};
  if (c.compare) {
    auto b = abm_to_json(c.compare->abm);
    b["cfl_safety"] = c.compare->cfl_safety;
    b["meanfield"] = c.compare->meanfield;
    b["abm_dir"] = c.compare->abm_dir;
    j["compare"] = b;
  }
  if (c.verify) j["verify"] = nlohmann::ordered_json::object();
  return j;
}

/// Settings that must agree for two runs to be comparable.
inline nlohmann::ordered_json comparison_settings(const ExperimentConfig& c) {
  const auto j = to_json(c);
  return {{"rule", j["rule"]}, {"payoff", j["payoff"]}, {"init", j["init"]}, {"grid", j["grid"]}};
}

namespace detail {

inline void emit_yaml(YAML::Emitter& out, const nlohmann::ordered_json& j) {
  if (j.is_object()) {
    out << YAML::BeginMap;
    for (auto it = j.begin(); it != j.end(); ++it) {
      out << YAML::Key << it.key() << YAML::Value;
      emit_yaml(out, it.value());
    }
    out << YAML::EndMap;
  } else if (j.is_array()) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : j) emit_yaml(out, v);
    out << YAML::EndSeq;
  } else if (j.is_boolean()) {
    out << (j.get<bool>() ? "true" : "false");
  } else if (j.is_number_float()) {
    out << format_double(j.get<double>());
  } else if (j.is_number_unsigned()) {
    out << j.get<std::uint64_t>();
  } else if (j.is_number_integer()) {
    out << j.get<std::int64_t>();
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.empty()) out << YAML::DoubleQuoted << s;
    else out << s;
  }
}

}  // namespace detail

/// Human-editable YAML form of the canonical JSON.
inline std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter out;
  detail::emit_yaml(out, to_json(c));
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, const std::string& where, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

template <class T>
T require(const YAML::Node& node, const char* key, const std::string& where) {
  if (!node[key]) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return get<T>(node, key, where, T{});
}

inline std::uint64_t get_count(const YAML::Node& node, const char* key, const std::string& where,
                               std::uint64_t fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  // Accept 2e5-style literals for counts as long as they are integral.
  double d = 0.0;
  try {
    d = v.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e18)
    throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

inline AbmBlock parse_abm(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> extra) {
  std::vector<const char*> keys{"n_agents", "episodes", "replicates", "n_snapshots", "snapshot_every"};
  keys.insert(keys.end(), extra.begin(), extra.end());
  if (!n.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
  AbmBlock b;
  b.n_agents = get_count(n, "n_agents", where, b.n_agents);
  b.episodes = get_count(n, "episodes", where, b.episodes);
  b.replicates = get_count(n, "replicates", where, b.replicates);
  b.n_snapshots = get_count(n, "n_snapshots", where, b.n_snapshots);
  b.snapshot_every = get_count(n, "snapshot_every", where, b.snapshot_every);
  return b;
}

inline InitSpec parse_init(const YAML::Node& n) {
  check_keys(n, "init", {"kind", "a", "b", "p"});
  std::string kind = require<std::string>(n, "kind", "init");
  std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (kind == "beta") return InitSpec::beta(require<double>(n, "a", "init"), require<double>(n, "b", "init"));
  if (kind == "uniform") return InitSpec::uniform();
  if (kind == "dirac") return InitSpec::dirac(require<double>(n, "p", "init"));
  throw ConfigError("unknown init kind '" + kind + "'");
}

}  // namespace detail

inline ExperimentConfig config_from_yaml(const YAML::Node& root) {
  using detail::get;
  using detail::get_count;
  detail::check_keys(root, "config",
                     {"name", "mode", "seed", "output_dir", "rule", "payoff", "init", "grid", "time_scale", "abm",
                      "fpe", "meanfield", "stationary", "compare", "verify"});
  ExperimentConfig c;
  const std::string top = "config";
  c.name = get<std::string>(root, "name", top, c.name);
  c.mode = parse_mode(detail::require<std::string>(root, "mode", top));
  if (!root["seed"]) throw ConfigError("missing key 'seed' in config");
  c.seed = get_count(root, "seed", top, c.seed);
  c.output_dir = get<std::string>(root, "output_dir", top, c.output_dir);
  try {
    c.rule = parse_rule(detail::require<std::string>(root, "rule", top));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (const auto n = root["payoff"]) {
    detail::check_keys(n, "payoff", {"b", "c", "H", "alpha", "beta"});
    c.payoff.b = get<double>(n, "b", "payoff", c.payoff.b);
    c.payoff.c = get<double>(n, "c", "payoff", c.payoff.c);
    c.payoff.H = get<int>(n, "H", "payoff", c.payoff.H);
    c.payoff.alpha = get<double>(n, "alpha", "payoff", c.payoff.alpha);
    c.payoff.beta = get<double>(n, "beta", "payoff", c.payoff.beta);
  }
  if (const auto n = root["init"]) c.init = detail::parse_init(n);
  if (const auto n = root["grid"]) {
    detail::check_keys(n, "grid", {"n_cells"});
    const auto cells = get_count(n, "n_cells", "grid", 200);
    if (cells < 2) throw ConfigError("grid.n_cells must be >= 2");
    c.grid = Grid(cells);
  }
  c.time_scale = get<double>(root, "time_scale", top, c.time_scale);

  if (const auto n = root["abm"]) c.abm = detail::parse_abm(n, "abm", {});
  if (const auto n = root["fpe"]) {
    detail::check_keys(n, "fpe", {"T", "cfl_safety", "drift_only", "n_snapshots", "particles", "n_particles",
                                  "particle_dt"});
    FpeBlock b;
    b.T = get<double>(n, "T", "fpe", b.T);
    b.cfl_safety = get<double>(n, "cfl_safety", "fpe", b.cfl_safety);
    b.drift_only = get<bool>(n, "drift_only", "fpe", b.drift_only);
    b.n_snapshots = get_count(n, "n_snapshots", "fpe", b.n_snapshots);
    b.particles = get<bool>(n, "particles", "fpe", b.particles);
    b.n_particles = get_count(n, "n_particles", "fpe", b.n_particles);
    b.particle_dt = get<double>(n, "particle_dt", "fpe", b.particle_dt);
    c.fpe = b;
  }
  if (const auto n = root["meanfield"]) {
    detail::check_keys(n, "meanfield", {"T", "dt", "n_snapshots"});
    MeanfieldBlock b;
    b.T = get<double>(n, "T", "meanfield", b.T);
    b.dt = get<double>(n, "dt", "meanfield", b.dt);
    b.n_snapshots = get_count(n, "n_snapshots", "meanfield", b.n_snapshots);
    c.meanfield = b;
  }
  if (const auto n = root["stationary"]) {
    detail::check_keys(n, "stationary", {"epsilon_schedule", "damping", "max_iters", "tol_w1"});
    StationaryBlock b;
    b.epsilon_schedule = get<std::vector<double>>(n, "epsilon_schedule", "stationary", b.epsilon_schedule);
    b.damping = get<double>(n, "damping", "stationary", b.damping);
    b.max_iters = get_count(n, "max_iters", "stationary", b.max_iters);
    b.tol_w1 = get<double>(n, "tol_w1", "stationary", b.tol_w1);
    c.stationary = b;
  }
  if (const auto n = root["compare"]) {
    CompareBlock b;
    b.abm = detail::parse_abm(n, "compare", {"cfl_safety", "meanfield", "abm_dir"});
    b.cfl_safety = get<double>(n, "cfl_safety", "compare", b.cfl_safety);
    b.meanfield = get<bool>(n, "meanfield", "compare", b.meanfield);
    b.abm_dir = get<std::string>(n, "abm_dir", "compare", b.abm_dir);
    c.compare = b;
  }
  if (const auto n = root["verify"]) {
    if (!n.IsNull() && !(n.IsMap() && n.size() == 0)) throw ConfigError("verify block takes no settings");
    c.verify = VerifyBlock{};
  }
  return c;
}

/// Parses and validates YAML or JSON text.
inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML/JSON: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping");
  auto c = config_from_yaml(root);
  c.validate();
  return c;
}

/// Switches a configuration to another mode. A missing block for the new
/// mode is derived from a compare block when there is one (same population
/// size, horizon and solver settings), otherwise defaults are used.
inline ExperimentConfig with_mode(ExperimentConfig c, Mode mode) {
  if (c.mode == mode) return c;
  const std::optional<CompareBlock> cmp = c.compare;
  const double horizon =
      cmp ? static_cast<double>(cmp->abm.episodes) / static_cast<double>(cmp->abm.n_agents) : 0.0;
  const bool keep_abm = mode == Mode::abm && c.abm, keep_fpe = mode == Mode::fpe && c.fpe;
  const bool keep_mf = mode == Mode::meanfield && c.meanfield, keep_st = mode == Mode::stationary && c.stationary;
  const bool keep_cmp = mode == Mode::compare && c.compare, keep_ver = mode == Mode::verify && c.verify;
  if (!keep_abm) c.abm.reset();
  if (!keep_fpe) c.fpe.reset();
  if (!keep_mf) c.meanfield.reset();
  if (!keep_st) c.stationary.reset();
  if (!keep_cmp) c.compare.reset();
  if (!keep_ver) c.verify.reset();
  switch (mode) {
    case Mode::abm:
      if (!c.abm) c.abm = cmp ? cmp->abm : AbmBlock{};
      break;
    case Mode::fpe:
      if (!c.fpe) {
        c.fpe = FpeBlock{};
        if (cmp) {
          c.fpe->T = horizon;
          c.fpe->cfl_safety = cmp->cfl_safety;
          c.fpe->n_snapshots = cmp->abm.n_snapshots;
        }
      }
      break;
    case Mode::meanfield:
      if (!c.meanfield) {
        c.meanfield = MeanfieldBlock{};
        if (cmp) {
          c.meanfield->T = horizon;
          c.meanfield->n_snapshots = cmp->abm.n_snapshots;
        }
      }
      break;
    case Mode::stationary:
      if (!c.stationary) c.stationary = StationaryBlock{};
      break;
    case Mode::compare:
      if (!c.compare) c.compare = CompareBlock{};
      break;
    case Mode::verify:
      if (!c.verify) c.verify = VerifyBlock{};
      break;
  }
  c.mode = mode;
  return c;
}

// ---------------------------------------------------------------------------
// Scaling and bundled configurations
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDeskAgents = 200;
inline constexpr std::size_t kDeskReplicates = 5;
inline constexpr double kDeskHorizonFactor = 0.2;

namespace detail {

inline void desk_scale_abm(AbmBlock& b) {
  const double T = static_cast<double>(b.episodes) / static_cast<double>(b.n_agents) * kDeskHorizonFactor;
  b.n_agents = kDeskAgents;
  b.episodes = static_cast<std::uint64_t>(std::llround(T * static_cast<double>(kDeskAgents)));
  b.replicates = std::min(b.replicates, kDeskReplicates);
}

}  // namespace detail

/// Desk scale: N = 200, the horizon t = E/N cut fivefold, at most five replicates.
inline ExperimentConfig desk_scaled(ExperimentConfig c) {
  if (c.abm) detail::desk_scale_abm(*c.abm);
  if (c.compare) detail::desk_scale_abm(c.compare->abm);
  if (c.fpe) c.fpe->T *= kDeskHorizonFactor;
  if (c.meanfield) c.meanfield->T *= kDeskHorizonFactor;
  return c;
}

/// Named configurations for the figure experiments at full scale
/// (N = 1000, E = 5e6, 30 replicates). Desk-scale variants come from desk_scaled.
inline std::map<std::string, ExperimentConfig> figure_configs() {
  std::map<std::string, ExperimentConfig> out;
  auto base = [](const std::string& name, PartnerRule rule, InitSpec init, double alpha) {
    ExperimentConfig c;
    c.name = name;
    c.mode = Mode::compare;
    c.seed = 42;
    c.output_dir = "out/" + name;
    c.rule = rule;
    c.payoff = PayoffParams{3.0, 0.1, 2, alpha, 0.0};
    c.init = init;
    c.grid = Grid(200);
    // Horizons scale with 1/alpha so that alpha * t, the natural clock, is shared.
    const double T = 5000.0 * (0.01 / alpha);
    c.time_scale = alpha / 0.01;
    CompareBlock b;
    b.abm.n_agents = 1000;
    b.abm.episodes = static_cast<std::uint64_t>(std::llround(T * 1000.0));
    b.abm.replicates = 30;
    b.abm.n_snapshots = 100;
    c.compare = b;
    return c;
  };
  for (PartnerRule r : kAllRules) {
    std::string lower(to_string(r));
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    out.emplace("fig1_" + lower, base("fig1_" + lower, r, InitSpec::beta(2, 2), 0.01));
  }
  for (auto [label, alpha] : {std::pair{"0.001", 0.001}, std::pair{"0.01", 0.01}, std::pair{"0.1", 0.1}})
    out.emplace(std::string("fig2_alpha_") + label,
                base(std::string("fig2_alpha_") + label, PartnerRule::OFT, InitSpec::dirac(0.5), alpha));
  out.emplace("fig3_uniform", base("fig3_uniform", PartnerRule::OFT, InitSpec::uniform(), 0.01));
  out.emplace("fig4_beta33", base("fig4_beta33", PartnerRule::OFT, InitSpec::beta(3, 3), 0.01));
  return out;
}

}  // namespace coopdyn
