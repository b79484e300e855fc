// Copyright 2026 The cqed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/system.hpp"

namespace cqed::cli {

// Raw key/value pairs per section, defaults filled in. Values keep the text the
// user wrote so that writing them back reproduces the run exactly.
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

struct ConfigKey {
  const char* section;
  const char* key;
  const char* fallback;  // nullptr marks a required key
  const char* help;
};

// Every accepted key; anything else is rejected.
const std::vector<ConfigKey>& config_schema();

struct HomodyneSettings {
  std::string tier = "reduced";  // reduced | full
  std::optional<double> phi;     // empty selects the optimal LO phase
  double eta = 1;
  double dt = 0;  // us, 0 selects the default step
  int trajectories = 200;
  int keep = 4;
  std::string mode = "ensemble";  // ensemble | telegraph
  double telegraph_duration = 0;  // us
  double telegraph_window = 0;    // us
  double threshold = 0.5;
  int bins = 40;
};

struct SweepSettings {
  std::string kind = "trace_distance";  // trace_distance | steady_state | snr
  std::vector<double> amplitudes_mhz;
  std::vector<double> gamma_phi_mhz;
  std::string reference = "full_secular";
  std::vector<std::string> models;
  double duration = 0;   // us, 0 selects the kind's default
  double fit_start = 0;  // us
};

struct ExperimentConfig {
  std::string source;  // file the table came from
  ConfigTable table;

  SystemParams system;
  std::string initial_qubit = "plus";
  std::string initial_cavity = "vacuum";

  std::vector<std::string> models;
  std::string reference;
  int fock_levels = 0;  // 0 selects the level count from the pointer amplitudes
  double rtol = 1e-7;
  double atol = 1e-9;
  std::optional<double> average_window;  // us; empty selects 2 pi / Delta for the full tiers

  double duration = 2;  // us
  int samples = 201;

  HomodyneSettings homodyne;
  SweepSettings sweep;

  std::uint64_t seed = 1;
  std::string output_directory;
  bool svg = true;
};

// Parses and validates; throws ConfigError with the file, section and key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
// Rebuilds the typed fields after the table has been edited (e.g. a seed override).
ExperimentConfig resolve_config(ConfigTable table, const std::string& source);

// INI text of the resolved table, every key present.
std::string to_ini(const ConfigTable& table);

}  // namespace cqed::cli
