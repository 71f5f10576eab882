#include "vcoh/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace vcoh {

namespace fs = std::filesystem;

namespace {

std::string tau_tag(double tau_c) { return "_tc" + format_double(tau_c); }

void require_sizes(const ObservableSeries& s) {
  const std::size_t n = s.size();
  if (s.rho_gg.size() != n || s.rho_11.size() != n || s.rho_22.size() != n ||
      s.rho_12.size() != n || s.abs_rho12.size() != n || s.coherence_fraction.size() != n ||
      s.purity.size() != n) {
    throw std::invalid_argument("observables: inconsistent series lengths");
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return out;
}

}  // namespace

std::string_view code_version() { return VCOH_VERSION; }

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_observables_csv(std::ostream& out, const ObservableSeries& s,
                           const ObservableErrors* errors) {
  require_sizes(s);
  out << kObservablesSchema << '\n' << "t_fs";
  for (auto name : kObservableNames) out << ',' << name;
  if (errors) {
    for (auto name : kObservableNames) out << ",stderr_" << name;
  }
  out << '\n';

  const auto err = errors ? errors->columns() : decltype(errors->columns()){};
  if (errors) {
    for (const auto* c : err) {
      if (c->size() != s.size()) throw std::invalid_argument("observables: stderr length");
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double row[kObservableCount] = {s.rho_gg[i],          s.rho_11[i],
                                          s.rho_22[i],          s.rho_12[i].real(),
                                          s.rho_12[i].imag(),   s.abs_rho12[i],
                                          s.coherence_fraction[i], s.purity[i]};
    out << format_double(s.t[i]);
    for (double v : row) out << ',' << format_double(v);
    if (errors) {
      for (const auto* c : err) out << ',' << format_double((*c)[i]);
    }
    out << '\n';
  }
}

void write_correlation_csv(std::ostream& out, const FieldStatsResult& st, double tau_d_1,
                           double tau_d_2) {
  const std::size_t n = st.g1_field1.lags.size();
  if (st.g1_field2.lags.size() != n || st.cross.lags.size() != n) {
    throw std::invalid_argument("correlation: lag grids differ");
  }
  out << kCorrelationSchema << '\n' << "lag_fs";
  for (int f = 1; f <= 2; ++f) {
    out << ",re_g1_" << f << ",im_g1_" << f << ",abs_g1_" << f << ",stderr_re_g1_" << f
        << ",stderr_im_g1_" << f << ",stderr_abs_g1_" << f;
  }
  out << ",re_cross,im_cross,abs_cross,stderr_abs_cross,abs_g1_model_1,abs_g1_model_2\n";

  auto model = [](double lag, double tau_d) {
    return std::isinf(tau_d) ? 1.0 : std::exp(-lag / tau_d);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double lag = st.g1_field1.lags[i];
    out << format_double(lag);
    for (const CorrelationSeries* g : {&st.g1_field1, &st.g1_field2}) {
      out << ',' << format_double(g->value[i].real()) << ',' << format_double(g->value[i].imag())
          << ',' << format_double(std::abs(g->value[i])) << ',' << format_double(g->stderr_re[i])
          << ',' << format_double(g->stderr_im[i]) << ',' << format_double(g->stderr_abs[i]);
    }
    out << ',' << format_double(st.cross.value[i].real()) << ','
        << format_double(st.cross.value[i].imag()) << ','
        << format_double(std::abs(st.cross.value[i])) << ','
        << format_double(st.cross.stderr_abs[i]) << ',' << format_double(model(lag, tau_d_1))
        << ',' << format_double(model(lag, tau_d_2)) << '\n';
  }
}

void write_realization_csv(std::ostream& out, const FieldRealization& field) {
  out << kRealizationSchema << '\n' << "t_fs,re_env,im_env\n";
  for (std::size_t i = 0; i < field.envelope.size(); ++i) {
    out << format_double(field.grid.time(i)) << ',' << format_double(field.envelope[i].real())
        << ',' << format_double(field.envelope[i].imag()) << '\n';
  }
}

void write_events_csv(std::ostream& out, const FieldRealization& field) {
  out << kEventsSchema << '\n' << "t_jump_fs,phase_rad\n";
  for (const auto& e : field.events) {
    out << format_double(e.time) << ',' << format_double(e.phase) << '\n';
  }
}

std::vector<fs::path> planned_outputs(const ScenarioConfig& cfg, const fs::path& dir) {
  std::vector<fs::path> files;
  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise:
      files.push_back(dir / (cfg.name + ".csv"));
      break;
    case ScenarioMode::PartiallyCoherent:
      if (cfg.sweep_tau_c_fs.empty()) {
        files.push_back(dir / (cfg.name + ".csv"));
      } else {
        for (double tc : cfg.sweep_tau_c_fs) files.push_back(dir / (cfg.name + tau_tag(tc) + ".csv"));
      }
      break;
    case ScenarioMode::FieldStatsOnly:
      files.push_back(dir / (cfg.name + "_correlation.csv"));
      for (std::size_t k = 0; k < cfg.dump_realizations; ++k) {
        for (int f = 1; f <= 2; ++f) {
          const std::string stem =
              cfg.name + "_r" + std::to_string(k) + "_field" + std::to_string(f);
          files.push_back(dir / (stem + ".csv"));
          files.push_back(dir / (stem + "_events.csv"));
        }
      }
      break;
  }
  files.push_back(dir / (cfg.name + ".manifest.json"));
  return files;
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  validate(cfg);
  RunReport report;
  report.outputs = planned_outputs(cfg, options.out_dir);
  if (!options.overwrite) {
    for (const auto& p : report.outputs) {
      if (fs::exists(p)) throw OutputCollision(p);
    }
  }
  fs::create_directories(options.out_dir);

  const auto start = std::chrono::steady_clock::now();
  const ScenarioResults results = execute(cfg);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json resolved = nlohmann::ordered_json::array();
  std::size_t next = 0;
  switch (cfg.mode) {
    case ScenarioMode::WhiteNoise: {
      auto out = open_out(report.outputs[next++]);
      write_observables_csv(out, results.white_noise);
      const TimeGrid g = white_noise_grid(cfg);
      resolved.push_back({{"dt_fs", g.dt}, {"n_steps", g.n_steps}});
      break;
    }
    case ScenarioMode::PartiallyCoherent:
      for (const auto& point : results.sweep) {
        auto out = open_out(report.outputs[next++]);
        write_observables_csv(out, point.result.observables, &point.result.std_errors);
        resolved.push_back({{"tau_c_fs", point.tau_c_fs},
                            {"dt_fs", point.engine.grid.dt},
                            {"n_steps", point.engine.grid.n_steps},
                            {"output_stride", point.engine.output_stride}});
      }
      break;
    case ScenarioMode::FieldStatsOnly: {
      const FieldStatsResult& st = *results.field_stats;
      {
        auto out = open_out(report.outputs[next++]);
        write_correlation_csv(out, st, cfg.fields[0].coherence_time_fs,
                              cfg.fields[1].coherence_time_fs);
      }
      for (std::size_t k = 0; k < st.dumped_field1.size(); ++k) {
        for (const auto* fld : {&st.dumped_field1[k], &st.dumped_field2[k]}) {
          auto env = open_out(report.outputs[next++]);
          write_realization_csv(env, *fld);
          auto ev = open_out(report.outputs[next++]);
          write_events_csv(ev, *fld);
        }
      }
      resolved.push_back({{"dt_fs", st.grid.dt}, {"n_steps", st.grid.n_steps}});
      break;
    }
  }

  auto manifest = nlohmann::ordered_json::parse(config_to_json(cfg));
  nlohmann::ordered_json run;
  run["code_version"] = std::string(code_version());
  run["master_seed"] = cfg.seed;
  run["wall_clock_s"] = report.wall_seconds;
  run["resolved_grids"] = resolved;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i + 1 < report.outputs.size(); ++i) {
    outputs.push_back(report.outputs[i].filename().string());
  }
  run["outputs"] = outputs;
  manifest["run"] = run;
  auto out = open_out(report.outputs.back());
  out << manifest.dump(2) << '\n';
  return report;
}

}  // namespace vcoh
