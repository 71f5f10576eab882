#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vcoh/scenario.hpp"

namespace vcoh {

struct Preset {
  std::string name;
  std::string reproduces;  // figure(s) the preset regenerates
  std::string summary;
  std::string config;      // YAML text
};

const std::vector<Preset>& presets();

// Throws std::out_of_range for unknown names.
const Preset& find_preset(std::string_view name);
ScenarioConfig load_preset(std::string_view name);

// One line per preset: name, figures, summary.
std::string list_presets();

}  // namespace vcoh
