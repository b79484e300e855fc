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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cqed/analysis.hpp"

namespace cqed::cli {
namespace {

const std::set<std::string> kTierModels = {"full", "full_secular", "dispersive"};
const std::set<std::string> kReducedModels = {"reduced_nonlinear", "reduced_linear"};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  Reader(const ConfigTable& t, const std::string& source) : t_(t), source_(source) {}

  const std::string& raw(const char* section, const char* key) const { return t_.at(section).at(key); }

  [[noreturn]] void fail(const char* section, const char* key, const std::string& what) const {
    throw ConfigError(source_ + ": [" + section + "] " + key + ": " + what);
  }

  double number(const char* section, const char* key) const { return parse_number(section, key, raw(section, key)); }

  double parse_number(const char* section, const char* key, const std::string& text) const {
    double v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v)) fail(section, key, "expected a number, got '" + text + "'");
    return v;
  }

  double non_negative(const char* section, const char* key) const {
    const double v = number(section, key);
    if (v < 0) fail(section, key, "must be non-negative, got " + raw(section, key));
    return v;
  }

  double positive(const char* section, const char* key) const {
    const double v = number(section, key);
    if (!(v > 0)) fail(section, key, "must be positive, got " + raw(section, key));
    return v;
  }

  long integer(const char* section, const char* key, long lo) const {
    const std::string& text = raw(section, key);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(section, key, "expected an integer, got '" + text + "'");
    if (v < lo) fail(section, key, "must be at least " + std::to_string(lo) + ", got " + text);
    return v;
  }

  std::uint64_t unsigned_integer(const char* section, const char* key) const {
    const std::string& text = raw(section, key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      fail(section, key, "expected a non-negative integer, got '" + text + "'");
    return v;
  }

  bool boolean(const char* section, const char* key) const {
    const std::string& text = raw(section, key);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail(section, key, "expected true or false, got '" + text + "'");
  }

  std::string choice(const char* section, const char* key, const std::set<std::string>& allowed) const {
    const std::string& text = raw(section, key);
    if (!allowed.contains(text)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(section, key, "unknown value '" + text + "' (expected one of " + list + ")");
    }
    return text;
  }

  // "auto" or a number
  std::optional<double> optional_number(const char* section, const char* key, const char* keyword = "auto") const {
    if (raw(section, key) == keyword) return std::nullopt;
    return number(section, key);
  }

  // Comma list or linspace(a, b, n).
  std::vector<double> number_list(const char* section, const char* key) const {
    const std::string text = raw(section, key);
    if (text.rfind("linspace(", 0) == 0) {
      if (text.back() != ')') fail(section, key, "unterminated linspace(...)");
      const auto args = split(text.substr(9, text.size() - 10), ',');
      if (args.size() != 3) fail(section, key, "linspace takes (start, stop, points)");
      const double a = parse_number(section, key, args[0]);
      const double b = parse_number(section, key, args[1]);
      const double n = parse_number(section, key, args[2]);
      if (n < 1 || n != std::floor(n)) fail(section, key, "linspace point count must be a positive integer");
      return linspace(a, b, static_cast<int>(n));
    }
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number(section, key, item));
    return out;
  }

  std::vector<std::string> model_list(const char* section, const char* key) const {
    auto out = split(raw(section, key), ',');
    for (const auto& m : out) {
      if (!kTierModels.contains(m) && !kReducedModels.contains(m))
        fail(section, key, "unknown model '" + m +
                               "' (expected full, full_secular, dispersive, reduced_nonlinear or reduced_linear)");
    }
    return out;
  }

 private:
  const ConfigTable& t_;
  const std::string& source_;
};

void require_increasing(const Reader& r, const std::vector<double>& v, const char* section, const char* key) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) r.fail(section, key, "values must be strictly increasing");
  }
}

ConfigTable table_from_ptree(const boost::property_tree::ptree& tree, const std::string& source) {
  std::map<std::string, std::set<std::string>> allowed;
  for (const auto& k : config_schema()) allowed[k.section].insert(k.key);

  ConfigTable table;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(source + ": key '" + section + "' lies outside any section");
    const auto known = allowed.find(section);
    if (known == allowed.end()) throw ConfigError(source + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError(source + ": [" + section + "] " + key + ": nested keys are not supported");
      if (!known->second.contains(key)) throw ConfigError(source + ": [" + section + "] unknown key '" + key + "'");
      table[section][key] = trim(value.data());
    }
  }
  for (const auto& k : config_schema()) {
    auto& sec = table[k.section];
    if (sec.contains(k.key)) continue;
    if (k.fallback == nullptr)
      throw ConfigError(source + ": [" + k.section + "] missing required key '" + k.key + "' (" + k.help + ")");
    sec[k.key] = k.fallback;
  }
  return table;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"system", "omega_r_mhz", nullptr, "resonator frequency"},
      {"system", "omega_a_mhz", nullptr, "qubit frequency"},
      {"system", "g_mhz", nullptr, "qubit-resonator coupling"},
      {"system", "kappa_mhz", nullptr, "resonator decay rate"},
      {"system", "gamma_1_mhz", nullptr, "qubit relaxation rate"},
      {"system", "gamma_phi_mhz", "0", "qubit pure dephasing rate"},
      {"system", "gamma_kappa_mhz", "white", "override of the dressed Purcell-like rate"},
      {"system", "kappa_gamma_mhz", "white", "override of the dressed resonator rate from qubit decay"},
      {"system", "gamma_plus_delta_mhz", "white", "override of the dephasing noise at +Delta"},
      {"system", "gamma_minus_delta_mhz", "white", "override of the dephasing noise at -Delta"},
      {"drive", "amplitude_mhz", "0", "measurement drive amplitude"},
      {"drive", "frequency_mhz", "resonator", "drive frequency, or 'resonator'"},
      {"drive", "phase_rad", "0", "drive phase"},
      {"drive", "envelope", "constant", "constant or tanh_ramp"},
      {"drive", "ramp_center_us", "1.5915494309189535", "tanh ramp centre"},
      {"drive", "ramp_width_us", "1.5915494309189535", "tanh ramp width"},
      {"initial", "qubit", "plus", "g, e, plus, minus, plus_y or minus_y"},
      {"initial", "cavity", "vacuum", "vacuum, or steady for the pointer state of the qubit level"},
      {"model", "models", "full, reduced_nonlinear, reduced_linear", "models evolved by run and compare"},
      {"model", "reference", "first", "reference model for distances, or 'first'"},
      {"model", "fock_levels", "auto", "resonator truncation, or 'auto'"},
      {"model", "rtol", "1e-7", "integrator relative tolerance"},
      {"model", "atol", "1e-9", "integrator absolute tolerance"},
      {"model", "average_window_us", "auto", "time-average window for the full tiers, or 'auto' (2 pi / Delta)"},
      {"run", "duration_us", "2", "simulated time"},
      {"run", "samples", "201", "output grid points"},
      {"run", "seed", "1", "random seed"},
      {"homodyne", "tier", "reduced", "reduced or full"},
      {"homodyne", "phi_rad", "optimal", "LO phase, or 'optimal'"},
      {"homodyne", "eta", "1", "detection efficiency"},
      {"homodyne", "dt_us", "auto", "trajectory time step, or 'auto'"},
      {"homodyne", "trajectories", "200", "ensemble size"},
      {"homodyne", "keep", "4", "trajectories written out individually"},
      {"homodyne", "mode", "ensemble", "ensemble or telegraph"},
      {"homodyne", "telegraph_duration_us", "800", "length of the telegraph record"},
      {"homodyne", "telegraph_window_us", "auto", "smoothing window, or 'auto' (10 / Gamma_ci)"},
      {"homodyne", "threshold", "0.5", "Schmitt trigger level"},
      {"homodyne", "bins", "40", "histogram bins"},
      {"sweep", "kind", "trace_distance", "trace_distance, steady_state or snr"},
      {"sweep", "amplitudes_mhz", "linspace(0, 20, 21)", "drive amplitudes"},
      {"sweep", "gamma_phi_mhz", "system", "dephasing rates, or 'system'"},
      {"sweep", "reference", "full_secular", "reference model"},
      {"sweep", "models", "reduced_nonlinear, reduced_linear", "models compared against the reference"},
      {"sweep", "duration_us", "auto", "simulated time per point, or 'auto'"},
      {"sweep", "fit_start_us", "auto", "start of the exponential fit, or 'auto'"},
      {"output", "directory", "auto", "output directory, or 'auto' for the config name"},
      {"output", "svg", "true", "write SVG plots"},
  };
  return schema;
}

ExperimentConfig resolve_config(ConfigTable table, const std::string& source) {
  ExperimentConfig c;
  c.source = source;
  c.table = std::move(table);
  const Reader r(c.table, source);

  auto& s = c.system;
  s.omega_r = mhz_to_rad_us(r.positive("system", "omega_r_mhz"));
  s.omega_a = mhz_to_rad_us(r.positive("system", "omega_a_mhz"));
  s.g = mhz_to_rad_us(r.non_negative("system", "g_mhz"));
  s.kappa = mhz_to_rad_us(r.non_negative("system", "kappa_mhz"));
  s.gamma_1 = mhz_to_rad_us(r.non_negative("system", "gamma_1_mhz"));
  s.gamma_phi = mhz_to_rad_us(r.non_negative("system", "gamma_phi_mhz"));
  auto override_rate = [&](const char* key, std::optional<double>& slot) {
    if (r.raw("system", key) == "white") return;
    slot = mhz_to_rad_us(r.non_negative("system", key));
  };
  override_rate("gamma_kappa_mhz", s.overrides.gamma_kappa);
  override_rate("kappa_gamma_mhz", s.overrides.kappa_gamma);
  override_rate("gamma_plus_delta_mhz", s.overrides.gamma_plus_delta);
  override_rate("gamma_minus_delta_mhz", s.overrides.gamma_minus_delta);
  if (s.omega_a == s.omega_r) r.fail("system", "omega_a_mhz", "qubit and resonator must be detuned");

  DriveSpec d;
  d.amplitude = mhz_to_rad_us(r.non_negative("drive", "amplitude_mhz"));
  const auto f = r.optional_number("drive", "frequency_mhz", "resonator");
  d.frequency = f ? mhz_to_rad_us(*f) : s.omega_r;
  d.phase = r.number("drive", "phase_rad");
  if (r.choice("drive", "envelope", {"constant", "tanh_ramp"}) == "tanh_ramp") {
    d.envelope = Envelope::tanh_ramp(r.number("drive", "ramp_center_us"), r.positive("drive", "ramp_width_us"));
  }
  s.drives.push_back(d);
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(source + ": " + e.what());
  }

  c.initial_qubit = r.choice("initial", "qubit", {"g", "e", "plus", "minus", "plus_y", "minus_y"});
  c.initial_cavity = r.choice("initial", "cavity", {"vacuum", "steady"});
  if (c.initial_cavity == "steady" && c.initial_qubit != "g" && c.initial_qubit != "e")
    r.fail("initial", "cavity", "the steady pointer state needs the qubit in g or e");

  c.models = r.model_list("model", "models");
  if (c.models.empty()) r.fail("model", "models", "at least one model is required");
  c.reference = r.raw("model", "reference") == "first" ? c.models.front() : r.raw("model", "reference");
  if (std::find(c.models.begin(), c.models.end(), c.reference) == c.models.end())
    r.fail("model", "reference", "'" + c.reference + "' is not among the models");
  c.fock_levels = r.raw("model", "fock_levels") == "auto" ? 0 : static_cast<int>(r.integer("model", "fock_levels", 2));
  c.rtol = r.positive("model", "rtol");
  c.atol = r.positive("model", "atol");
  c.average_window = r.optional_number("model", "average_window_us");
  if (c.average_window && *c.average_window < 0) r.fail("model", "average_window_us", "must be non-negative");

  c.duration = r.positive("run", "duration_us");
  c.samples = static_cast<int>(r.integer("run", "samples", 2));
  c.seed = r.unsigned_integer("run", "seed");

  auto& h = c.homodyne;
  h.tier = r.choice("homodyne", "tier", {"reduced", "full"});
  h.phi = r.optional_number("homodyne", "phi_rad", "optimal");
  h.eta = r.number("homodyne", "eta");
  if (!(h.eta >= 0 && h.eta <= 1)) r.fail("homodyne", "eta", "must lie in [0, 1]");
  const auto dt = r.optional_number("homodyne", "dt_us");
  if (dt && !(*dt > 0)) r.fail("homodyne", "dt_us", "must be positive");
  h.dt = dt.value_or(0);
  h.trajectories = static_cast<int>(r.integer("homodyne", "trajectories", 1));
  h.keep = static_cast<int>(r.integer("homodyne", "keep", 0));
  h.mode = r.choice("homodyne", "mode", {"ensemble", "telegraph"});
  h.telegraph_duration = r.positive("homodyne", "telegraph_duration_us");
  const auto w = r.optional_number("homodyne", "telegraph_window_us");
  if (w && !(*w > 0)) r.fail("homodyne", "telegraph_window_us", "must be positive");
  h.telegraph_window = w.value_or(0);
  h.threshold = r.number("homodyne", "threshold");
  if (!(h.threshold > 0 && h.threshold < 1)) r.fail("homodyne", "threshold", "must lie in (0, 1)");
  h.bins = static_cast<int>(r.integer("homodyne", "bins", 2));

  auto& sw = c.sweep;
  sw.kind = r.choice("sweep", "kind", {"trace_distance", "steady_state", "snr"});
  sw.amplitudes_mhz = r.number_list("sweep", "amplitudes_mhz");
  require_increasing(r, sw.amplitudes_mhz, "sweep", "amplitudes_mhz");
  for (double a : sw.amplitudes_mhz) {
    if (a < 0) r.fail("sweep", "amplitudes_mhz", "amplitudes must be non-negative");
  }
  if (r.raw("sweep", "gamma_phi_mhz") == "system") {
    sw.gamma_phi_mhz = {rad_us_to_mhz(s.gamma_phi)};
  } else {
    sw.gamma_phi_mhz = r.number_list("sweep", "gamma_phi_mhz");
    require_increasing(r, sw.gamma_phi_mhz, "sweep", "gamma_phi_mhz");
    if (sw.gamma_phi_mhz.empty() || sw.gamma_phi_mhz.front() < 0)
      r.fail("sweep", "gamma_phi_mhz", "needs at least one non-negative rate");
  }
  sw.reference = r.choice("sweep", "reference", kTierModels);
  sw.models = r.model_list("sweep", "models");
  const auto sd = r.optional_number("sweep", "duration_us");
  if (sd && !(*sd > 0)) r.fail("sweep", "duration_us", "must be positive");
  sw.duration = sd.value_or(0);
  const auto fs = r.optional_number("sweep", "fit_start_us");
  if (fs && *fs < 0) r.fail("sweep", "fit_start_us", "must be non-negative");
  sw.fit_start = fs.value_or(-1);

  const std::string& dir = r.raw("output", "directory");
  c.output_directory = dir == "auto" ? std::filesystem::path(source).stem().string() : dir;
  c.svg = r.boolean("output", "svg");
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return resolve_config(table_from_ptree(tree, source), source);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string to_ini(const ConfigTable& table) {
  std::ostringstream out;
  bool first = true;
  // Schema order, not alphabetical, so the file reads like the shipped configs.
  std::string section;
  for (const auto& k : config_schema()) {
    if (section != k.section) {
      section = k.section;
      if (!first) out << '\n';
      first = false;
      out << '[' << section << "]\n";
    }
    out << k.key << " = " << table.at(k.section).at(k.key) << '\n';
  }
  return out.str();
}

}  // namespace cqed::cli
