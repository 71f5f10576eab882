#pragma once

// Experiment descriptions: parsing, validation and execution.
//
// Configs are YAML key-value trees (JSON is accepted as well, so a run manifest
// can be fed back in). Frequencies are given in THz and read as angular
// frequencies, w[rad/fs] = value[THz] * 1e-3; times are in fs.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vcoh/ensemble_engine.hpp"
#include "vcoh/field_gen.hpp"
#include "vcoh/observables.hpp"
#include "vcoh/quantum_core.hpp"
#include "vcoh/white_noise_model.hpp"

namespace vcoh {

inline constexpr double kRadPerFsPerThz = 1e-3;

// Validation failure naming the offending config key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ScenarioMode { WhiteNoise, PartiallyCoherent, FieldStatsOnly };
std::string_view to_string(ScenarioMode mode);

struct FieldSpec {
  NoiseModel model = NoiseModel::PhaseJump;
  double coherence_time_fs = 60.0;
  double rabi_thz = 10.0;
  double carrier_detuning_thz = 0.0;
  bool random_initial_phase = false;
  double initial_phase_rad = 0.0;
};

struct GridSpec {
  double t_end_fs = 0.0;
  std::optional<double> dt_fs;  // empty: derived from the physical time scales
  double output_every_fs = 0.0;  // 0: every step
};

struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::PartiallyCoherent;
  std::string name;  // output file prefix
  std::uint64_t seed = 1;

  // partially_coherent
  double tau_c_fs = 400.0;
  std::vector<double> sweep_tau_c_fs;  // optional; overrides tau_c_fs
  std::array<FieldSpec, 2> fields;
  DriveConfig drive;
  std::size_t trajectories = 10000;
  unsigned workers = 1;
  PropagationMethod method = PropagationMethod::PiecewiseExp;
  int rk4_substeps = 1;

  // white_noise
  double gamma_1_thz = 250.0;
  double gamma_2_thz = 250.0;
  double omega_12_thz = 0.0;
  WhiteNoiseSolver white_noise_solver = WhiteNoiseSolver::ClosedForm;

  // field_stats
  std::size_t realizations = 10000;
  std::optional<double> max_lag_fs;  // default 3 tau_d
  std::size_t dump_realizations = 0;

  GridSpec grid;
};

// Throws ConfigError for syntax errors, unknown keys, missing or invalid values.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// Checks everything that can be checked without running.
void validate(const ScenarioConfig& cfg);

// Serialized form accepted by parse_config (JSON).
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

// Defaults used when grid.dt_fs is empty.
double default_dt(const ScenarioConfig& cfg, double tau_c_fs);

// Tau_c values a partially coherent config expands to.
std::vector<double> tau_c_values(const ScenarioConfig& cfg);

// Engine configuration for one partially coherent run.
EnsembleConfig ensemble_config(const ScenarioConfig& cfg, double tau_c_fs);

PumpRates pump_rates(const ScenarioConfig& cfg);
TimeGrid white_noise_grid(const ScenarioConfig& cfg);

struct FieldStatsResult {
  TimeGrid grid;
  CorrelationSeries g1_field1;
  CorrelationSeries g1_field2;
  CorrelationSeries cross;
  std::vector<FieldRealization> dumped_field1;
  std::vector<FieldRealization> dumped_field2;
};

FieldStatsResult run_field_stats(const ScenarioConfig& cfg);

struct SweepPoint {
  double tau_c_fs = 0.0;
  EnsembleConfig engine;
  EnsembleResult result;
};

struct ScenarioResults {
  ScenarioMode mode = ScenarioMode::PartiallyCoherent;
  ObservableSeries white_noise;    // WhiteNoise
  std::vector<SweepPoint> sweep;   // PartiallyCoherent
  std::optional<FieldStatsResult> field_stats;
};

ScenarioResults execute(const ScenarioConfig& cfg);

}  // namespace vcoh
