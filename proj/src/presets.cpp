#include "vcoh/presets.hpp"

#include <sstream>
#include <stdexcept>

namespace vcoh {

namespace {

std::string partially_coherent(const std::string& name, double tau_d, const std::string& tau_c,
                               double t_end) {
  std::ostringstream s;
  s << "mode: partially_coherent\n"
    << "name: " << name << "\n"
    << "seed: 1\n"
    << "system:\n"
    << "  " << tau_c << "\n"
    << "fields:\n";
  for (int i = 0; i < 2; ++i) {
    s << "  - model: phase_jump\n"
      << "    coherence_time_fs: " << tau_d << "\n"
      << "    rabi_thz: 10\n"
      << "    initial_phase: uniform\n";
  }
  s << "drive:\n"
    << "  coupling: cross_coupled\n"
    << "  carrier: per_transition\n"
    << "ensemble:\n"
    << "  trajectories: 10000\n"
    << "  workers: 1\n"
    << "  method: piecewise_exp\n"
    << "grid:\n"
    << "  t_end_fs: " << t_end << "\n"
    << "  dt_fs: auto\n"
    << "  output_every_fs: 2\n";
  return s.str();
}

std::string field_stats(const std::string& name, double tau_d, int seed) {
  std::ostringstream s;
  s << "mode: field_stats\n"
    << "name: " << name << "\n"
    << "seed: " << seed << "\n"
    << "fields:\n"
    << "  model: phase_jump\n"
    << "  coherence_time_fs: " << tau_d << "\n"
    << "  rabi_thz: 10\n"
    << "  initial_phase: uniform\n"
    << "field_stats:\n"
    << "  realizations: 10000\n"
    << "  max_lag_fs: " << 3 * tau_d << "\n"
    << "  dump_realizations: 3\n"
    << "grid:\n"
    << "  t_end_fs: " << 40 * tau_d << "\n"
    << "  dt_fs: " << tau_d / 20 << "\n";
  return s.str();
}

std::vector<Preset> build() {
  const std::string sweep = "sweep_tau_c_fs: [50, 100, 200, 400]";
  std::vector<Preset> v;
  v.push_back({"whitenoise_equilibration", "Figs. 1-2",
               "broadband pumping, Gamma1 = Gamma2 = 250 THz; populations and purity relax to 1/3",
               "mode: white_noise\n"
               "name: whitenoise_equilibration\n"
               "pump:\n"
               "  gamma_1_thz: 250\n"
               "  gamma_2_thz: 250\n"
               "  omega_12_thz: 0\n"
               "  solver: closed_form\n"
               "grid:\n"
               "  t_end_fs: 100\n"
               "  dt_fs: 0.01\n"
               "  output_every_fs: 0.1\n"});
  v.push_back({"partial_tau60", "Figs. 3, 5, 6",
               "noisy drive, tau_d = 60 fs, tau_c in {50, 100, 200, 400} fs",
               partially_coherent("partial_tau60", 60, sweep, 1000)});
  v.push_back({"partial_tau120", "Figs. 4, 7, 8",
               "noisy drive, tau_d = 120 fs, tau_c in {50, 100, 200, 400} fs",
               partially_coherent("partial_tau120", 120, sweep, 1000)});
  v.push_back({"partial_tau120_tc400", "Fig. 4 (tau_c = 400 fs curve)",
               "single run, tau_d = 120 fs, tau_c = 400 fs",
               partially_coherent("partial_tau120_tc400", 120, "tau_c_fs: 400", 1000)});
  v.push_back({"field_stats_tau60", "Fig. 9, field coherence",
               "field autocorrelation and cross-correlation, tau_d = 60 fs",
               field_stats("field_stats_tau60", 60, 1)});
  v.push_back({"field_stats_tau120", "Fig. 9, field coherence",
               "field autocorrelation and cross-correlation, tau_d = 120 fs",
               field_stats("field_stats_tau120", 120, 2)});
  v.push_back({"splitting_sweep_tau120", "Figs. 4, 7, 8 (extended splitting sweep)",
               "tau_d = 120 fs, tau_c in {25, 50, 100, 200, 400, 800} fs",
               partially_coherent("splitting_sweep_tau120", 120,
                                  "sweep_tau_c_fs: [25, 50, 100, 200, 400, 800]", 1000)});
  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("unknown preset '" + std::string(name) + "'");
}

ScenarioConfig load_preset(std::string_view name) { return parse_config(find_preset(name).config); }

std::string list_presets() {
  std::ostringstream s;
  for (const auto& p : presets()) {
    s << p.name << "  [" << p.reproduces << "]  " << p.summary << "\n";
  }
  return s.str();
}

}  // namespace vcoh
