#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vcoh/output.hpp"
#include "vcoh/presets.hpp"
#include "vcoh/quantum_core.hpp"
#include "vcoh/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<unsigned> workers;
  std::string out_dir = ".";
  bool overwrite = false;
};

void apply(const Overrides& o, vcoh::ScenarioConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.trajectories) {
    cfg.trajectories = *o.trajectories;
    cfg.realizations = *o.trajectories;
  }
  if (o.workers) cfg.workers = *o.workers;
}

int run(vcoh::ScenarioConfig cfg, const Overrides& o) {
  apply(o, cfg);
  const auto report = vcoh::run_scenario(cfg, {o.out_dir, o.overwrite});
  for (const auto& p : report.outputs) std::cout << p.string() << '\n';
  std::cerr << cfg.name << ": done in " << report.wall_seconds << " s\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-driven coherence in a three-level V system"};
  app.set_version_flag("--version", std::string(vcoh::code_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--trajectories", o.trajectories,
                 "ensemble size (field_stats: number of realizations)");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", o.out_dir, "output directory");
  app.add_flag("--overwrite", o.overwrite, "replace existing outputs");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run a YAML or JSON config (manifests are accepted)");
  run_cmd->add_option("config", config_path)->required();

  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "run a built-in preset");
  preset_cmd->add_option("name", preset_name)->required();

  std::string show_name;
  auto* show_cmd = app.add_subcommand("show-preset", "print a preset's config");
  show_cmd->add_option("name", show_name)->required();

  auto* list_cmd = app.add_subcommand("list-presets", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (list_cmd->parsed()) {
      std::cout << vcoh::list_presets();
      return kExitOk;
    }
    if (show_cmd->parsed()) {
      std::cout << vcoh::find_preset(show_name).config;
      return kExitOk;
    }
    if (preset_cmd->parsed()) return run(vcoh::load_preset(preset_name), o);
    return run(vcoh::load_config(config_path), o);
  } catch (const vcoh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vcoh::OutputCollision& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vcoh::StepSizeError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
