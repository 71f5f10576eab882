#pragma once

// File outputs. Column orders are fixed:
//
// observables CSV   t_fs, rho_gg, rho_11, rho_22, re_rho12, im_rho12, abs_rho12,
//                   coherence_fraction, purity
//                   + stderr_<observable> for the same eight columns (ensemble runs)
// correlation CSV   lag_fs, then for f in {1, 2}: re_g1_f, im_g1_f, abs_g1_f,
//                   stderr_re_g1_f, stderr_im_g1_f, stderr_abs_g1_f,
//                   then re_cross, im_cross, abs_cross, stderr_abs_cross,
//                   abs_g1_model_1, abs_g1_model_2
// realization CSV   t_fs, re_env, im_env
// events CSV        t_jump_fs, phase_rad
//
// Every CSV starts with a "# <schema> v<version>" comment line.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcoh/observables.hpp"
#include "vcoh/scenario.hpp"

namespace vcoh {

inline constexpr std::string_view kObservablesSchema = "# vcoh-observables v1";
inline constexpr std::string_view kCorrelationSchema = "# vcoh-correlation v1";
inline constexpr std::string_view kRealizationSchema = "# vcoh-realization v1";
inline constexpr std::string_view kEventsSchema = "# vcoh-events v1";

std::string_view code_version();

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

void write_observables_csv(std::ostream& out, const ObservableSeries& series,
                           const ObservableErrors* errors = nullptr);
void write_correlation_csv(std::ostream& out, const FieldStatsResult& stats,
                           double tau_d_1, double tau_d_2);
void write_realization_csv(std::ostream& out, const FieldRealization& field);
void write_events_csv(std::ostream& out, const FieldRealization& field);

class OutputCollision : public std::runtime_error {
 public:
  explicit OutputCollision(const std::filesystem::path& p)
      : std::runtime_error("output exists (use --overwrite): " + p.string()), path_(p) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool overwrite = false;
};

struct RunReport {
  std::vector<std::filesystem::path> outputs;  // manifest last
  double wall_seconds = 0.0;
};

// Files a run of cfg writes, manifest last.
std::vector<std::filesystem::path> planned_outputs(const ScenarioConfig& cfg,
                                                   const std::filesystem::path& out_dir);

// Validates, checks for collisions, executes and writes every output.
RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options);

}  // namespace vcoh
