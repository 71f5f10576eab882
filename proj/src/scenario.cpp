#include "vcoh/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vcoh {

namespace {

using nlohmann::ordered_json;

// Map node reader that remembers which keys were consumed so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    YAML::Node n = raw(key);
    if (!n) throw ConfigError(key_path(key), "missing required value");
    if (!n.IsScalar()) throw ConfigError(key_path(key), "expected a scalar value");
    try {
      if constexpr (std::is_same_v<T, double>) {
        const std::string s = n.Scalar();
        if (s == "inf" || s == ".inf" || s == "Infinity") {
          return std::numeric_limits<double>::infinity();
        }
      }
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key), "cannot read '" + n.Scalar() + "' as " + type_name<T>());
    }
  }

  Section sub(const std::string& key) {
    YAML::Node n = raw(key);
    if (!n) throw ConfigError(key_path(key), "missing required section");
    return Section(n, key_path(key));
  }

  void ignore(const std::string& key) { used_.insert(key); }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError(key_path(key), "unknown key");
    }
  }

 private:
  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    return "a non-negative integer";
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename Fn>
auto enum_value(const std::string& path, Fn&& parse, const std::string& text) {
  try {
    return parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

ScenarioMode mode_from_string(const std::string& path, const std::string& s) {
  if (s == "white_noise") return ScenarioMode::WhiteNoise;
  if (s == "partially_coherent") return ScenarioMode::PartiallyCoherent;
  if (s == "field_stats") return ScenarioMode::FieldStatsOnly;
  throw ConfigError(path, "unknown mode '" + s +
                              "' (expected white_noise, partially_coherent or field_stats)");
}

FieldSpec parse_field(Section s) {
  FieldSpec f;
  f.model = enum_value(s.key_path("model"), noise_model_from_string,
                       s.get<std::string>("model", "phase_jump"));
  f.coherence_time_fs = s.require<double>("coherence_time_fs");
  f.rabi_thz = s.get<double>("rabi_thz", f.rabi_thz);
  f.carrier_detuning_thz = s.get<double>("carrier_detuning_thz", 0.0);
  const std::string phase = s.get<std::string>("initial_phase", "fixed");
  if (phase == "uniform") {
    f.random_initial_phase = true;
  } else if (phase != "fixed") {
    throw ConfigError(s.key_path("initial_phase"), "expected fixed or uniform");
  }
  f.initial_phase_rad = s.get<double>("initial_phase_rad", 0.0);
  s.finish();
  return f;
}

void parse_fields(Section& root, ScenarioConfig& cfg) {
  YAML::Node n = root.raw("fields");
  if (!n) throw ConfigError("fields", "missing required section");
  if (n.IsMap()) {
    cfg.fields[0] = cfg.fields[1] = parse_field(Section(n, "fields"));
  } else if (n.IsSequence()) {
    if (n.size() != 2) throw ConfigError("fields", "expected exactly two fields");
    for (std::size_t i = 0; i < 2; ++i) {
      cfg.fields[i] = parse_field(Section(n[i], "fields[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("fields", "expected a mapping or a list of two mappings");
  }
}

void parse_grid(Section& root, ScenarioConfig& cfg) {
  Section g = root.sub("grid");
  cfg.grid.t_end_fs = g.require<double>("t_end_fs");
  if (g.has("dt_fs")) {
    YAML::Node d = g.raw("dt_fs");
    if (d.IsScalar() && d.Scalar() == "auto") {
      cfg.grid.dt_fs.reset();
    } else {
      try {
        cfg.grid.dt_fs = d.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError("grid.dt_fs", "expected a number or 'auto'");
      }
    }
  }
  cfg.grid.output_every_fs = g.get<double>("output_every_fs", 0.0);
  g.finish();
}

std::string json_number_or_inf(double v) {
  return std::isinf(v) ? ".inf" : std::string();
}

ordered_json field_json(const FieldSpec& f) {
  ordered_json j;
  j["model"] = std::string(to_string(f.model));
  if (std::isinf(f.coherence_time_fs)) {
    j["coherence_time_fs"] = json_number_or_inf(f.coherence_time_fs);
  } else {
    j["coherence_time_fs"] = f.coherence_time_fs;
  }
  j["rabi_thz"] = f.rabi_thz;
  j["carrier_detuning_thz"] = f.carrier_detuning_thz;
  j["initial_phase"] = f.random_initial_phase ? "uniform" : "fixed";
  j["initial_phase_rad"] = f.initial_phase_rad;
  return j;
}

FieldParams field_params(const FieldSpec& f) {
  FieldParams p;
  p.model = f.model;
  p.coherence_time = f.coherence_time_fs;
  p.rabi_amplitude = f.rabi_thz * kRadPerFsPerThz;
  p.carrier_detuning = f.carrier_detuning_thz * kRadPerFsPerThz;
  p.random_initial_phase = f.random_initial_phase;
  p.initial_phase = f.initial_phase_rad;
  return p;
}

double min_coherence_time(const ScenarioConfig& cfg) {
  return std::min(cfg.fields[0].coherence_time_fs, cfg.fields[1].coherence_time_fs);
}

double resolved_dt(const ScenarioConfig& cfg, double tau_c_fs) {
  return cfg.grid.dt_fs ? *cfg.grid.dt_fs : default_dt(cfg, tau_c_fs);
}

TimeGrid strided_grid(const ScenarioConfig& cfg, double dt, std::size_t* stride_out) {
  std::size_t stride = 1;
  if (cfg.grid.output_every_fs > 0.0) {
    stride = std::max<std::size_t>(1, static_cast<std::size_t>(
                                          std::llround(cfg.grid.output_every_fs / dt)));
  }
  const double block = dt * static_cast<double>(stride);
  const auto blocks = static_cast<std::size_t>(std::ceil(cfg.grid.t_end_fs / block - 1e-9));
  if (stride_out) *stride_out = stride;
  return TimeGrid{0.0, dt, std::max<std::size_t>(1, blocks) * stride};
}

void check_name(const std::string& name) {
  if (name.empty()) throw ConfigError("name", "missing required value");
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      throw ConfigError("name", "only letters, digits, '_', '-' and '.' are allowed");
    }
  }
}

}  // namespace

std::string_view to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::WhiteNoise:
      return "white_noise";
    case ScenarioMode::PartiallyCoherent:
      return "partially_coherent";
    case ScenarioMode::FieldStatsOnly:
      return "field_stats";
  }
  return "unknown";
}

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("parse error: ") + e.what());
  }
  if (!doc || doc.IsNull()) throw ConfigError("<document>", "empty configuration");
  Section root(doc, "");

  ScenarioConfig cfg;
  cfg.mode = mode_from_string("mode", root.require<std::string>("mode"));
  cfg.name = root.require<std::string>("name");
  cfg.seed = root.get<std::uint64_t>("seed", cfg.seed);
  root.ignore("run");  // manifest metadata

  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise: {
      Section p = root.sub("pump");
      cfg.gamma_1_thz = p.require<double>("gamma_1_thz");
      cfg.gamma_2_thz = p.require<double>("gamma_2_thz");
      cfg.omega_12_thz = p.get<double>("omega_12_thz", 0.0);
      const std::string solver = p.get<std::string>("solver", "closed_form");
      if (solver == "adaptive") {
        cfg.white_noise_solver = WhiteNoiseSolver::Adaptive;
      } else if (solver != "closed_form") {
        throw ConfigError("pump.solver", "expected closed_form or adaptive");
      }
      p.finish();
      parse_grid(root, cfg);
      break;
    }
    case ScenarioMode::PartiallyCoherent: {
      Section sys = root.sub("system");
      if (sys.has("sweep_tau_c_fs")) {
        YAML::Node list = sys.raw("sweep_tau_c_fs");
        if (!list.IsSequence() || list.size() == 0) {
          throw ConfigError("system.sweep_tau_c_fs", "expected a non-empty list of numbers");
        }
        for (const auto& v : list) {
          try {
            cfg.sweep_tau_c_fs.push_back(v.as<double>());
          } catch (const YAML::Exception&) {
            throw ConfigError("system.sweep_tau_c_fs", "expected a list of numbers");
          }
        }
        cfg.tau_c_fs = sys.get<double>("tau_c_fs", cfg.sweep_tau_c_fs.front());
      } else {
        cfg.tau_c_fs = sys.require<double>("tau_c_fs");
      }
      sys.finish();

      parse_fields(root, cfg);

      Section d = root.sub("drive");
      cfg.drive.coupling = enum_value("drive.coupling", coupling_scheme_from_string,
                                      d.get<std::string>("coupling", "exclusive"));
      cfg.drive.carrier = enum_value("drive.carrier", carrier_scheme_from_string,
                                     d.get<std::string>("carrier", "per_transition"));
      d.finish();

      Section e = root.sub("ensemble");
      cfg.trajectories = e.require<std::size_t>("trajectories");
      cfg.workers = e.get<unsigned>("workers", 1);
      cfg.method = enum_value("ensemble.method", propagation_method_from_string,
                              e.get<std::string>("method", "piecewise_exp"));
      cfg.rk4_substeps = e.get<int>("rk4_substeps", 1);
      e.finish();

      parse_grid(root, cfg);
      break;
    }
    case ScenarioMode::FieldStatsOnly: {
      parse_fields(root, cfg);
      Section s = root.sub("field_stats");
      cfg.realizations = s.require<std::size_t>("realizations");
      if (s.has("max_lag_fs")) cfg.max_lag_fs = s.require<double>("max_lag_fs");
      cfg.dump_realizations = s.get<std::size_t>("dump_realizations", 0);
      s.finish();
      parse_grid(root, cfg);
      break;
    }
  }
  root.finish();
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& cfg) {
  check_name(cfg.name);
  auto positive = [](const std::string& key, double v) {
    if (!(v > 0.0) || std::isnan(v)) throw ConfigError(key, "must be positive");
  };
  auto finite_nonneg = [](const std::string& key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(key, "must be non-negative and finite");
    }
  };

  if (!std::isfinite(cfg.grid.t_end_fs)) throw ConfigError("grid.t_end_fs", "must be finite");
  positive("grid.t_end_fs", cfg.grid.t_end_fs);
  finite_nonneg("grid.output_every_fs", cfg.grid.output_every_fs);
  if (cfg.grid.dt_fs) {
    if (!std::isfinite(*cfg.grid.dt_fs)) throw ConfigError("grid.dt_fs", "must be finite");
    positive("grid.dt_fs", *cfg.grid.dt_fs);
  }

  if (cfg.mode == ScenarioMode::WhiteNoise) {
    finite_nonneg("pump.gamma_1_thz", cfg.gamma_1_thz);
    finite_nonneg("pump.gamma_2_thz", cfg.gamma_2_thz);
    if (!std::isfinite(cfg.omega_12_thz)) throw ConfigError("pump.omega_12_thz", "must be finite");
    if (!cfg.grid.dt_fs && cfg.gamma_1_thz == 0.0 && cfg.gamma_2_thz == 0.0) {
      throw ConfigError("grid.dt_fs", "required when both pump rates are zero");
    }
    return;
  }

  for (std::size_t i = 0; i < 2; ++i) {
    const std::string p = "fields[" + std::to_string(i) + "].";
    const FieldSpec& f = cfg.fields[i];
    positive(p + "coherence_time_fs", f.coherence_time_fs);
    finite_nonneg(p + "rabi_thz", f.rabi_thz);
    if (!std::isfinite(f.carrier_detuning_thz)) {
      throw ConfigError(p + "carrier_detuning_thz", "must be finite");
    }
    if (!std::isfinite(f.initial_phase_rad)) {
      throw ConfigError(p + "initial_phase_rad", "must be finite");
    }
  }

  if (cfg.mode == ScenarioMode::FieldStatsOnly) {
    if (cfg.realizations < 2) throw ConfigError("field_stats.realizations", "must be at least 2");
    const double dt = resolved_dt(cfg, 0.0);
    if (dt > min_coherence_time(cfg) * kMaxStepPerCoherenceTime * (1.0 + 1e-12)) {
      throw ConfigError("grid.dt_fs", "must not exceed coherence_time_fs / 20");
    }
    if (cfg.max_lag_fs) {
      if (!(*cfg.max_lag_fs >= 0.0)) throw ConfigError("field_stats.max_lag_fs", "must be >= 0");
      if (*cfg.max_lag_fs > cfg.grid.t_end_fs) {
        throw ConfigError("field_stats.max_lag_fs", "exceeds grid.t_end_fs");
      }
    } else if (3.0 * min_coherence_time(cfg) > cfg.grid.t_end_fs) {
      throw ConfigError("field_stats.max_lag_fs",
                        "default of 3 coherence times exceeds grid.t_end_fs");
    }
    return;
  }

  // partially coherent
  if (cfg.trajectories < 2) throw ConfigError("ensemble.trajectories", "must be at least 2");
  if (cfg.workers < 1) throw ConfigError("ensemble.workers", "must be at least 1");
  if (cfg.rk4_substeps < 1) throw ConfigError("ensemble.rk4_substeps", "must be at least 1");
  const auto taus = tau_c_values(cfg);
  for (double tc : taus) {
    const std::string key = cfg.sweep_tau_c_fs.empty() ? "system.tau_c_fs"
                                                       : "system.sweep_tau_c_fs";
    positive(key, tc);
    const double dt = resolved_dt(cfg, tc);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("grid.dt_fs", "cannot derive a time step; set grid.dt_fs explicitly");
    }
    if (dt > min_coherence_time(cfg) * kMaxStepPerCoherenceTime * (1.0 + 1e-12)) {
      throw ConfigError("grid.dt_fs", "must not exceed coherence_time_fs / 20");
    }
  }
}

std::vector<double> tau_c_values(const ScenarioConfig& cfg) {
  if (!cfg.sweep_tau_c_fs.empty()) return cfg.sweep_tau_c_fs;
  return {cfg.tau_c_fs};
}

double default_dt(const ScenarioConfig& cfg, double tau_c_fs) {
  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise: {
      const double g = std::max(cfg.gamma_1_thz, cfg.gamma_2_thz) * kRadPerFsPerThz;
      return g > 0.0 ? 1.0 / (100.0 * g) : 0.0;
    }
    case ScenarioMode::FieldStatsOnly:
      return min_coherence_time(cfg) * kMaxStepPerCoherenceTime;
    case ScenarioMode::PartiallyCoherent: {
      double scale = std::min(min_coherence_time(cfg), tau_c_fs);
      const double rabi =
          std::max(cfg.fields[0].rabi_thz, cfg.fields[1].rabi_thz) * kRadPerFsPerThz;
      if (rabi > 0.0) scale = std::min(scale, 2.0 * std::numbers::pi / rabi);
      return scale / 100.0;
    }
  }
  return 0.0;
}

std::string config_to_json(const ScenarioConfig& cfg, int indent) {
  ordered_json j;
  j["mode"] = std::string(to_string(cfg.mode));
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise:
      j["pump"] = {{"gamma_1_thz", cfg.gamma_1_thz},
                   {"gamma_2_thz", cfg.gamma_2_thz},
                   {"omega_12_thz", cfg.omega_12_thz},
                   {"solver", cfg.white_noise_solver == WhiteNoiseSolver::ClosedForm
                                  ? "closed_form"
                                  : "adaptive"}};
      break;
    case ScenarioMode::PartiallyCoherent: {
      ordered_json sys;
      sys["tau_c_fs"] = cfg.tau_c_fs;
      if (!cfg.sweep_tau_c_fs.empty()) sys["sweep_tau_c_fs"] = cfg.sweep_tau_c_fs;
      j["system"] = sys;
      j["fields"] = ordered_json::array({field_json(cfg.fields[0]), field_json(cfg.fields[1])});
      j["drive"] = {{"coupling", std::string(to_string(cfg.drive.coupling))},
                    {"carrier", std::string(to_string(cfg.drive.carrier))}};
      j["ensemble"] = {{"trajectories", cfg.trajectories},
                       {"workers", cfg.workers},
                       {"method", std::string(to_string(cfg.method))},
                       {"rk4_substeps", cfg.rk4_substeps}};
      break;
    }
    case ScenarioMode::FieldStatsOnly: {
      j["fields"] = ordered_json::array({field_json(cfg.fields[0]), field_json(cfg.fields[1])});
      ordered_json fs;
      fs["realizations"] = cfg.realizations;
      if (cfg.max_lag_fs) fs["max_lag_fs"] = *cfg.max_lag_fs;
      fs["dump_realizations"] = cfg.dump_realizations;
      j["field_stats"] = fs;
      break;
    }
  }
  ordered_json grid;
  grid["t_end_fs"] = cfg.grid.t_end_fs;
  if (cfg.grid.dt_fs) {
    grid["dt_fs"] = *cfg.grid.dt_fs;
  } else {
    grid["dt_fs"] = "auto";
  }
  grid["output_every_fs"] = cfg.grid.output_every_fs;
  j["grid"] = grid;
  return j.dump(indent);
}

EnsembleConfig ensemble_config(const ScenarioConfig& cfg, double tau_c_fs) {
  EnsembleConfig e;
  e.n_trajectories = cfg.trajectories;
  e.master_seed = cfg.seed;
  e.grid = strided_grid(cfg, resolved_dt(cfg, tau_c_fs), &e.output_stride);
  e.workers = cfg.workers;
  e.scenario.omega_21 = 2.0 * std::numbers::pi / tau_c_fs;
  e.scenario.drive = cfg.drive;
  e.scenario.fields = {field_params(cfg.fields[0]), field_params(cfg.fields[1])};
  e.scenario.method = cfg.method;
  e.scenario.rk4_substeps = cfg.rk4_substeps;
  return e;
}

PumpRates pump_rates(const ScenarioConfig& cfg) {
  return {cfg.gamma_1_thz * kRadPerFsPerThz, cfg.gamma_2_thz * kRadPerFsPerThz,
          cfg.omega_12_thz * kRadPerFsPerThz};
}

TimeGrid white_noise_grid(const ScenarioConfig& cfg) {
  // Both solvers are exact between output points, so only output times are kept.
  std::size_t stride = 1;
  TimeGrid g = strided_grid(cfg, resolved_dt(cfg, 0.0), &stride);
  return TimeGrid{g.t0, g.dt * static_cast<double>(stride), g.n_steps / stride};
}

FieldStatsResult run_field_stats(const ScenarioConfig& cfg) {
  FieldStatsResult out;
  out.grid = TimeGrid::covering(cfg.grid.t_end_fs, resolved_dt(cfg, 0.0));
  const double max_lag = cfg.max_lag_fs ? *cfg.max_lag_fs : 3.0 * min_coherence_time(cfg);
  const std::vector<double> lags = lag_grid(out.grid, std::min(max_lag, out.grid.span()));

  CorrelationAccumulator g1(out.grid, lags), g2(out.grid, lags), cross(out.grid, lags);
  FieldParams p1 = field_params(cfg.fields[0]);
  FieldParams p2 = field_params(cfg.fields[1]);
  for (std::size_t k = 0; k < cfg.realizations; ++k) {
    p1.stream_id = field_stream(k, 0);
    p2.stream_id = field_stream(k, 1);
    FieldRealization a = sample_field(p1, cfg.seed, out.grid);
    FieldRealization b = sample_field(p2, cfg.seed, out.grid);
    g1.add(a, a);
    g2.add(b, b);
    cross.add(a, b);
    if (k < cfg.dump_realizations) {
      out.dumped_field1.push_back(std::move(a));
      out.dumped_field2.push_back(std::move(b));
    }
  }
  out.g1_field1 = g1.result();
  out.g1_field2 = g2.result();
  out.cross = cross.result();
  return out;
}

ScenarioResults execute(const ScenarioConfig& cfg) {
  validate(cfg);
  ScenarioResults r;
  r.mode = cfg.mode;
  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise:
      r.white_noise = solve_white_noise(pump_rates(cfg), WhiteNoiseState{},
                                        white_noise_grid(cfg), cfg.white_noise_solver);
      break;
    case ScenarioMode::PartiallyCoherent:
      for (double tc : tau_c_values(cfg)) {
        SweepPoint p;
        p.tau_c_fs = tc;
        p.engine = ensemble_config(cfg, tc);
        p.result = run_ensemble(p.engine);
        r.sweep.push_back(std::move(p));
      }
      break;
    case ScenarioMode::FieldStatsOnly:
      r.field_stats = run_field_stats(cfg);
      break;
  }
  return r;
}

}  // namespace vcoh
