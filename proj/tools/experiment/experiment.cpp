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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "cqed/lindblad.hpp"
#include "cqed/reduced.hpp"

namespace cqed::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_reduced(const std::string& model) { return model.rfind("reduced_", 0) == 0; }

ReducedVariant variant_of(const std::string& model) { return parse_reduced_variant(model.substr(8)); }

double mhz(double rad_us) { return rad_us_to_mhz(rad_us); }

std::string describe(const std::exception& e) {
  if (dynamic_cast<const TruncationOverflow*>(&e)) return std::string("truncation overflow: ") + e.what();
  if (dynamic_cast<const SolverFailure*>(&e)) return std::string("solver failure: ") + e.what();
  return e.what();
}

// Tags the failure class so the CLI can still map sweep failures to exit codes.
template <class F>
auto tagged(F&& f) {
  return [f = std::forward<F>(f)](double x) {
    try {
      return f(x);
    } catch (const Error& e) {
      throw Error(describe(e));
    }
  };
}

SystemParams point_params(const SystemParams& base, double gamma_phi_mhz, double amplitude_mhz) {
  SystemParams p = base;
  p.gamma_phi = mhz_to_rad_us(gamma_phi_mhz);
  p.drives.front().amplitude = mhz_to_rad_us(amplitude_mhz);
  return p;
}

struct Initial {
  std::string qubit;
  std::string cavity;
};

Initial initial_of(const ExperimentConfig& c) { return {c.initial_qubit, c.initial_cavity}; }

PointerState initial_pointer(const ReducedModel& m, const Initial& init) {
  return init.cavity == "steady" ? m.pointer_steady_state() : PointerState{};
}

Qubit2 qubit_density(const Eigen::Vector2cd& ket) { return ket * ket.adjoint(); }

int fock_levels_for(const ExperimentConfig& c, const SystemParams& p, const std::vector<double>& times,
                    const Initial& init) {
  if (c.fock_levels > 0) return c.fock_levels;
  if (dispersive_regime(p.lambda()) == RegimeLevel::outside)
    throw ConfigError("[model] fock_levels = auto needs |g / Delta| <= 0.25; set the level count explicitly");
  const ReducedModel m(p, ReducedVariant::nonlinear);
  const auto ev = evolve_reduced(m, qubit_density(qubit_ket(init.qubit)), initial_pointer(m, init), times);
  double n = 0;
  for (const auto& s : ev.samples) n = std::max({n, s.pointer.n_e(), s.pointer.n_g()});
  return suggested_fock_levels(n);
}

ModelRun run_model(const ExperimentConfig& c, const SystemParams& p, const std::string& model,
                   const std::vector<double>& times, int fock_levels, const Initial& init) {
  ModelRun run;
  run.model = model;
  run.series.times = times;
  const auto ket = qubit_ket(init.qubit);
  IntegratorOptions io;
  io.rtol = c.rtol;
  io.atol = c.atol;
  if (is_reduced(model)) {
    const ReducedModel m(p, variant_of(model));
    const auto ev = evolve_reduced(m, qubit_density(ket), initial_pointer(m, init), times, io);
    const double lambda = p.lambda();
    run.min_eigenvalue = 1;
    for (const auto& s : ev.samples) {
      run.trace_error = std::max(run.trace_error, std::abs(s.qubit.trace() - 1.0));
      run.hermiticity_error = std::max(run.hermiticity_error, (s.qubit - s.qubit.adjoint()).cwiseAbs().maxCoeff());
      run.min_eigenvalue =
          std::min(run.min_eigenvalue, Eigen::SelfAdjointEigenSolver<Qubit2>(s.qubit, Eigen::EigenvaluesOnly).eigenvalues()(0));
      const Bloch b = bloch_vector(s.qubit);
      const double pe = 0.5 * (1 + b.z);
      const double n = pe * s.pointer.n_e() + (1 - pe) * s.pointer.n_g();
      run.series.bloch.push_back(b);
      run.photons.push_back(n);
      run.sz_bare.push_back(sz_steady_bare(lambda, b.z, n));
    }
    return run;
  }
  const ModelTier tier = parse_model_tier(model);
  const HilbertDims dims(fock_levels);
  run.fock_levels = fock_levels;
  cplx alpha = 0;
  if (init.cavity == "steady") {
    const auto s = ReducedModel(p, ReducedVariant::nonlinear).pointer_steady_state();
    alpha = init.qubit == "e" ? s.alpha_e : s.alpha_g;
  }
  EvolveOptions eo;
  eo.integrator = io;
  eo.positivity_dim_limit = 240;
  const auto ev = evolve(tier, dims, p, product_state(dims, ket, alpha), times, eo);
  run.trace_error = ev.max_trace_error;
  run.hermiticity_error = ev.max_hermiticity_error;
  run.min_eigenvalue = ev.min_eigenvalue;
  QubitSeries bare{times, {}};
  for (const auto& s : ev.samples) {
    run.series.bloch.push_back(bloch_vector(s.qubit_dispersive));
    bare.bloch.push_back(bloch_vector(s.qubit_bare));
    run.photons.push_back(s.photons);
  }
  // Components at the qubit-resonator detuning only survive in the full tier.
  const double window =
      c.average_window.value_or(tier == ModelTier::full ? kTwoPi / std::abs(p.omega_a - p.omega_r) : 0.0);
  if (window > 0) {
    run.series = time_average(run.series, window);
    bare = time_average(bare, window);
  }
  for (const auto& b : bare.bloch) run.sz_bare.push_back(b.z);
  return run;
}

std::string sweep_axis_name(const ExperimentConfig& c) { return c.sweep.kind + " point"; }

struct GridPoint {
  double gamma_phi_mhz;
  double amplitude_mhz;
};

std::vector<GridPoint> sweep_grid(const ExperimentConfig& c) {
  std::vector<GridPoint> g;
  for (double gp : c.sweep.gamma_phi_mhz)
    for (double a : c.sweep.amplitudes_mhz) g.push_back({gp, a});
  return g;
}

double steady_photons(const SystemParams& p) {
  if (dispersive_regime(p.lambda()) == RegimeLevel::outside) return kNaN;
  const auto s = ReducedModel(p, ReducedVariant::nonlinear).pointer_steady_state();
  return 0.5 * (s.n_e() + s.n_g());
}

// Worst state checks over all runs of a point.
void record_checks(std::map<std::string, double>& v, const ModelRun& r) {
  auto worst = [&](const char* key, double x, bool larger) {
    const auto it = v.find(key);
    if (it == v.end()) v[key] = x;
    else it->second = larger ? std::max(it->second, x) : std::min(it->second, x);
  };
  worst("check/trace_error", r.trace_error, true);
  worst("check/hermiticity_error", r.hermiticity_error, true);
  worst("check/min_eigenvalue", r.min_eigenvalue, false);
}

std::map<std::string, double> trace_distance_point(const ExperimentConfig& c, const GridPoint& g) {
  const SystemParams p = point_params(c.system, g.gamma_phi_mhz, g.amplitude_mhz);
  const auto times = time_grid(c.sweep.duration > 0 ? c.sweep.duration : c.duration, c.samples);
  const Initial init = initial_of(c);
  const int n = fock_levels_for(c, p, times, init);
  const auto ref = run_model(c, p, c.sweep.reference, times, n, init);
  std::map<std::string, double> v{{"n_steady", steady_photons(p)}, {"fock_levels", static_cast<double>(n)}};
  record_checks(v, ref);
  for (const auto& model : c.sweep.models) {
    const auto run = run_model(c, p, model, times, n, init);
    record_checks(v, run);
    const auto d = trace_distance_series(ref.series, run.series);
    v["max_distance/" + model] = d.max;
    v["t_at_max/" + model] = d.t_at_max;
  }
  return v;
}

// Qubit in |e> with the resonator in its pointer state, then free decay under
// the continuous drive.
std::map<std::string, double> steady_state_point(const ExperimentConfig& c, const GridPoint& g) {
  const SystemParams p = point_params(c.system, g.gamma_phi_mhz, g.amplitude_mhz);
  const ReducedModel m(p, ReducedVariant::nonlinear);
  const auto s = m.pointer_steady_state();
  const double geff = gamma_eff(m, s);
  const double nbar = 0.5 * (s.n_e() + s.n_g());
  const double sz_disp = sz_steady(m.rates(0.0, s));
  const double sz_model = sz_steady_bare(p.lambda(), sz_disp, nbar);
  const double duration = c.sweep.duration > 0 ? c.sweep.duration : 4.0 / geff;
  const auto times = time_grid(duration, c.samples);
  const Initial init{"e", "steady"};
  const int n = fock_levels_for(c, p, times, init);
  const auto ref = run_model(c, p, c.sweep.reference, times, n, init);
  const double t0 = c.sweep.fit_start >= 0 ? c.sweep.fit_start : 0.2 / geff;
  const auto fit = fit_exponential_decay(times, ref.sz_bare, t0);
  std::map<std::string, double> v{{"n_steady", nbar},
          {"fock_levels", static_cast<double>(n)},
          {"duration_us", duration},
          {"gamma_eff_fit_mhz", mhz(fit.rate)},
          {"gamma_eff_model_mhz", mhz(geff)},
          {"sz_fit", fit.offset},
          {"sz_model", sz_model},
          {"sz_model_dispersive", sz_disp},
          {"fit_amplitude", fit.amplitude},
          {"residual_rms", fit.residual_rms},
          {"decaying", fit.decaying ? 1.0 : 0.0}};
  record_checks(v, ref);
  return v;
}

std::map<std::string, double> snr_point(const ExperimentConfig& c, const GridPoint& g) {
  const SystemParams p = point_params(c.system, g.gamma_phi_mhz, g.amplitude_mhz);
  std::map<std::string, double> v;
  for (const auto& model : c.sweep.models) {
    const ReducedModel m(p, variant_of(model));
    const auto s = m.pointer_steady_state();
    const double phi = c.homodyne.phi.value_or(optimal_lo_phase(m, s));
    const auto r = measurement_rates_unchecked(m, s, phi, c.homodyne.eta);
    const double geff = gamma_eff(m, s);
    v["n_steady/" + model] = 0.5 * (s.n_e() + s.n_g());
    v["phi/" + model] = phi;
    v["gamma_m/" + model] = mhz(r.gamma_m);
    v["gamma_ci/" + model] = mhz(r.gamma_ci);
    v["gamma_ba/" + model] = mhz(r.gamma_ba);
    v["gamma_eff/" + model] = mhz(geff);
    v["snr/" + model] = r.gamma_ci / geff;
  }
  return v;
}

double value_or_nan(const SweepRow& r, const std::string& key) {
  const auto it = r.values.find(key);
  return it == r.values.end() ? kNaN : it->second;
}

std::string status_of(const SweepRow& r) { return r.failure ? *r.failure : "ok"; }

const char* kTimeLabel = "t (us)";
const char* kAmpLabel = "drive amplitude / 2 pi (MHz)";

}  // namespace

Derived derive(const SystemParams& p) {
  Derived d;
  const auto dp = p.dispersive();
  d.lambda = dp.lambda;
  d.chi_mhz = mhz(dp.chi);
  d.zeta_mhz = mhz(dp.zeta);
  d.n_crit = dp.n_crit;
  d.n_kappa = dp.n_kappa;
  const double l = std::abs(d.lambda);
  switch (dispersive_regime(d.lambda)) {
    case RegimeLevel::ok: break;
    case RegimeLevel::weak:
      d.warnings.push_back("|g / Delta| = " + format_number(l) + " is above 0.1: higher-order corrections grow");
      break;
    case RegimeLevel::outside:
      d.warnings.push_back("|g / Delta| = " + format_number(l) +
                           " is outside dispersive regime; only the full model applies");
      break;
  }
  d.n_steady = steady_photons(p);
  if (std::isfinite(d.n_steady)) {
    if (d.n_steady > 0.1 * d.n_crit)
      d.warnings.push_back("steady photon number " + format_number(d.n_steady) + " exceeds 0.1 n_crit = " +
                           format_number(0.1 * d.n_crit));
    if (d.n_steady > d.n_kappa)
      d.warnings.push_back("steady photon number " + format_number(d.n_steady) + " exceeds n_kappa = " +
                           format_number(d.n_kappa) + ": pointer states are no longer coherent");
  }
  return d;
}

nlohmann::json to_json(const Derived& d) {
  nlohmann::json j;
  j["lambda"] = d.lambda;
  j["chi_mhz"] = d.chi_mhz;
  j["zeta_mhz"] = d.zeta_mhz;
  j["n_crit"] = d.n_crit;
  j["n_kappa"] = d.n_kappa;
  j["n_steady"] = std::isfinite(d.n_steady) ? nlohmann::json(d.n_steady) : nlohmann::json(nullptr);
  j["warnings"] = d.warnings;
  return j;
}

std::vector<double> time_grid(double duration, int samples) { return linspace(0.0, duration, samples); }

Eigen::Vector2cd qubit_ket(const std::string& name) {
  const double r = 1 / std::sqrt(2.0);
  if (name == "g") return {1, 0};
  if (name == "e") return {0, 1};
  if (name == "plus") return {r, r};
  if (name == "minus") return {r, -r};
  // <sigma_y> = 2 Im rho_ge
  if (name == "plus_y") return {r, -I1 * r};
  if (name == "minus_y") return {r, I1 * r};
  throw ConfigError("unknown qubit state '" + name + "'");
}

int fock_levels_for(const ExperimentConfig& c, const SystemParams& p, const std::vector<double>& times) {
  return fock_levels_for(c, p, times, initial_of(c));
}

ModelRun run_model(const ExperimentConfig& c, const SystemParams& p, const std::string& model,
                   const std::vector<double>& times, int fock_levels) {
  return run_model(c, p, model, times, fock_levels, initial_of(c));
}

EvolutionOutcome run_evolution(const ExperimentConfig& c, bool compare) {
  if (compare && c.models.size() < 2) throw ConfigError(c.source + ": [model] models: compare needs two models");
  const auto times = time_grid(c.duration, c.samples);
  const bool any_tier = std::any_of(c.models.begin(), c.models.end(), [](const auto& m) { return !is_reduced(m); });
  const int n = any_tier ? fock_levels_for(c, c.system, times) : 0;
  EvolutionOutcome o;
  for (const auto& model : c.models) o.runs.push_back(run_model(c, c.system, model, times, n));
  if (compare) {
    const auto ref = std::find_if(o.runs.begin(), o.runs.end(), [&](const auto& r) { return r.model == c.reference; });
    for (const auto& r : o.runs) {
      if (r.model == c.reference) continue;
      o.distances.emplace_back(r.model, trace_distance_series(ref->series, r.series));
    }
  }
  return o;
}

Artifacts evolution_artifacts(const ExperimentConfig& c, const EvolutionOutcome& o, bool compare) {
  Artifacts a;
  CsvTable ev("evolution", {"model", "t_us", "sx", "sy", "sz", "sz_bare", "photons"});
  Plot bp{"Qubit evolution (dispersive frame)", kTimeLabel, "Bloch components", {}};
  for (const auto& r : o.runs) {
    a.fock_levels_max = std::max(a.fock_levels_max, r.fock_levels);
    PlotSeries sx{r.model + " sx", r.series.times, {}}, sy{r.model + " sy", r.series.times, {}},
        sz{r.model + " sz", r.series.times, {}};
    for (std::size_t k = 0; k < r.series.times.size(); ++k) {
      const auto& b = r.series.bloch[k];
      ev.row() << r.model << r.series.times[k] << b.x << b.y << b.z << r.sz_bare[k] << r.photons[k];
      sx.y.push_back(b.x);
      sy.y.push_back(b.y);
      sz.y.push_back(b.z);
    }
    const bool dashed = is_reduced(r.model);
    sx.dashed = sy.dashed = sz.dashed = dashed;
    bp.series.push_back(sx);
    bp.series.push_back(sy);
    bp.series.push_back(sz);
    a.results["final"][r.model] = {{"sx", r.series.bloch.back().x},
                                   {"sy", r.series.bloch.back().y},
                                   {"sz", r.series.bloch.back().z},
                                   {"photons", r.photons.back()}};
  }
  a.tables.push_back(std::move(ev));
  a.plots.emplace_back("evolution", std::move(bp));
  if (!compare) return a;

  CsvTable dist("distance", {"model", "reference", "t_us", "distance"});
  CsvTable summary("distance_summary", {"model", "reference", "max_distance", "t_at_max_us"});
  Plot dp{"Trace distance to " + c.reference, kTimeLabel, "trace distance", {}};
  for (const auto& [model, d] : o.distances) {
    for (std::size_t k = 0; k < d.times.size(); ++k) dist.row() << model << c.reference << d.times[k] << d.distance[k];
    summary.row() << model << c.reference << d.max << d.t_at_max;
    dp.series.push_back({model, d.times, d.distance});
    a.results["max_distance"][model] = d.max;
  }
  a.tables.push_back(std::move(dist));
  a.tables.push_back(std::move(summary));
  a.plots.emplace_back("distance", std::move(dp));
  return a;
}

SweepResult run_parameter_sweep(const ExperimentConfig& c, int workers) {
  const auto grid = sweep_grid(c);
  std::vector<double> axis(grid.size());
  for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = static_cast<double>(i);
  const auto& kind = c.sweep.kind;
  if (kind == "snr") {
    for (const auto& m : c.sweep.models) {
      if (!is_reduced(m)) throw ConfigError(c.source + ": [sweep] models: the snr sweep takes reduced models only");
    }
  }
  std::function<std::map<std::string, double>(double)> fn = [&](double x) {
    const auto& g = grid[static_cast<std::size_t>(x)];
    std::map<std::string, double> v = kind == "trace_distance" ? trace_distance_point(c, g)
                                      : kind == "steady_state" ? steady_state_point(c, g)
                                                               : snr_point(c, g);
    return v;
  };
  auto res = run_sweep(sweep_axis_name(c), kind == "trace_distance" || kind == "steady_state" ? c.sweep.reference : "reduced",
                       axis, workers, tagged(fn));
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    res.rows[i].values["gamma_phi_mhz"] = grid[i].gamma_phi_mhz;
    res.rows[i].values["amplitude_mhz"] = grid[i].amplitude_mhz;
  }
  return res;
}

Artifacts sweep_artifacts(const ExperimentConfig& c, const SweepResult& r) {
  Artifacts a;
  const auto& kind = c.sweep.kind;
  auto label = [](double gp) { return "gamma_phi/2pi = " + format_number(gp) + " MHz"; };
  long failures = 0;
  for (const auto& row : r.rows) {
    if (row.failure) ++failures;
    const double n = value_or_nan(row, "fock_levels");
    if (std::isfinite(n)) a.fock_levels_max = std::max(a.fock_levels_max, static_cast<int>(std::lround(n)));
  }
  a.results["points"] = r.rows.size();
  a.results["failures"] = failures;

  if (kind == "trace_distance") {
    CsvTable t("sweep_trace_distance", {"gamma_phi_mhz", "amplitude_mhz", "n_steady", "fock_levels", "reference",
                                        "model", "max_distance", "t_at_max_us", "status"});
    Plot p{"Maximum trace distance to " + c.sweep.reference, kAmpLabel, "max trace distance", {}};
    for (const auto& model : c.sweep.models) {
      for (double gp : c.sweep.gamma_phi_mhz) {
        PlotSeries s{model + ", " + label(gp), {}, {}, true, is_reduced(model) && model == "reduced_linear"};
        for (const auto& row : r.rows) {
          if (row.values.at("gamma_phi_mhz") != gp) continue;
          const double amp = row.values.at("amplitude_mhz");
          const double d = value_or_nan(row, "max_distance/" + model);
          t.row() << gp << amp << value_or_nan(row, "n_steady") << value_or_nan(row, "fock_levels") << c.sweep.reference
                  << model << d << value_or_nan(row, "t_at_max/" + model) << status_of(row);
          s.x.push_back(amp);
          s.y.push_back(d);
        }
        p.series.push_back(std::move(s));
      }
    }
    a.tables.push_back(std::move(t));
    a.plots.emplace_back("sweep_trace_distance", std::move(p));
  } else if (kind == "steady_state") {
    CsvTable t("sweep_steady_state",
               {"gamma_phi_mhz", "amplitude_mhz", "n_steady", "fock_levels", "duration_us", "gamma_eff_fit_mhz",
                "gamma_eff_model_mhz", "sz_fit", "sz_model", "sz_model_dispersive", "fit_amplitude", "residual_rms",
                "decaying", "status"});
    Plot psz{"Steady-state <sigma_z> (bare basis)", kAmpLabel, "<sigma_z>", {}};
    Plot pge{"Effective decay rate", kAmpLabel, "gamma_eff / 2 pi (MHz)", {}};
    for (double gp : c.sweep.gamma_phi_mhz) {
      PlotSeries fit_sz{"fit, " + label(gp), {}, {}, true}, model_sz{"model, " + label(gp), {}, {}, false, true};
      PlotSeries fit_ge{"fit, " + label(gp), {}, {}, true}, model_ge{"model, " + label(gp), {}, {}, false, true};
      for (const auto& row : r.rows) {
        if (row.values.at("gamma_phi_mhz") != gp) continue;
        const double amp = row.values.at("amplitude_mhz");
        auto cell = t.row();
        cell << gp << amp;
        for (const char* k : {"n_steady", "fock_levels", "duration_us", "gamma_eff_fit_mhz", "gamma_eff_model_mhz",
                              "sz_fit", "sz_model", "sz_model_dispersive", "fit_amplitude", "residual_rms",
                              "decaying"})
          cell << value_or_nan(row, k);
        cell << status_of(row);
        for (auto* s : {&fit_sz, &model_sz, &fit_ge, &model_ge}) s->x.push_back(amp);
        fit_sz.y.push_back(value_or_nan(row, "sz_fit"));
        model_sz.y.push_back(value_or_nan(row, "sz_model"));
        fit_ge.y.push_back(value_or_nan(row, "gamma_eff_fit_mhz"));
        model_ge.y.push_back(value_or_nan(row, "gamma_eff_model_mhz"));
      }
      psz.series.push_back(std::move(fit_sz));
      psz.series.push_back(std::move(model_sz));
      pge.series.push_back(std::move(fit_ge));
      pge.series.push_back(std::move(model_ge));
    }
    a.tables.push_back(std::move(t));
    a.plots.emplace_back("sweep_sz_steady", std::move(psz));
    a.plots.emplace_back("sweep_gamma_eff", std::move(pge));
  } else {
    CsvTable t("sweep_snr", {"gamma_phi_mhz", "amplitude_mhz", "model", "n_steady", "phi_rad", "gamma_m_mhz",
                             "gamma_ci_mhz", "gamma_ba_mhz", "gamma_eff_mhz", "snr", "status"});
    Plot p{"Signal-to-noise ratio", "mean photon number", "Gamma_ci / gamma_eff", {}};
    for (const auto& model : c.sweep.models) {
      for (double gp : c.sweep.gamma_phi_mhz) {
        PlotSeries s{model + ", " + label(gp), {}, {}, true, model == "reduced_linear"};
        for (const auto& row : r.rows) {
          if (row.values.at("gamma_phi_mhz") != gp) continue;
          auto cell = t.row();
          cell << gp << row.values.at("amplitude_mhz") << model;
          for (const char* k : {"n_steady/", "phi/", "gamma_m/", "gamma_ci/", "gamma_ba/", "gamma_eff/", "snr/"})
            cell << value_or_nan(row, k + model);
          cell << status_of(row);
          s.x.push_back(value_or_nan(row, "n_steady/" + model));
          s.y.push_back(value_or_nan(row, "snr/" + model));
        }
        p.series.push_back(std::move(s));
      }
    }
    a.tables.push_back(std::move(t));
    a.plots.emplace_back("sweep_snr", std::move(p));
  }
  return a;
}

TrajectoryOutcome run_ensemble(const ExperimentConfig& c, int workers) {
  const auto& h = c.homodyne;
  const auto times = time_grid(c.duration, c.samples);
  const Initial init = initial_of(c);
  const auto ket = qubit_ket(init.qubit);
  const ReducedModel m(c.system, ReducedVariant::nonlinear);
  const auto steady = m.pointer_steady_state();
  HomodyneConfig hc;
  hc.phi = h.phi.value_or(optimal_lo_phase(m, steady));
  hc.eta = h.eta;
  hc.dt = h.dt;
  hc.n_traj = h.trajectories;
  hc.seed = c.seed;
  hc.workers = workers;

  TrajectoryOutcome o;
  o.tier = h.tier;
  o.phi = hc.phi;
  o.master_equation.times = times;
  if (h.tier == "reduced") {
    const auto ptr0 = initial_pointer(m, init);
    o.set = run_reduced_trajectories(m, qubit_density(ket), ptr0, times, hc);
    IntegratorOptions io;
    io.rtol = c.rtol;
    io.atol = c.atol;
    for (const auto& s : evolve_reduced(m, qubit_density(ket), ptr0, times, io).samples)
      o.master_equation.bloch.push_back(bloch_vector(s.qubit));
  } else {
    o.fock_levels = fock_levels_for(c, c.system, times, init);
    const HilbertDims dims(o.fock_levels);
    cplx alpha = 0;
    if (init.cavity == "steady") alpha = init.qubit == "e" ? steady.alpha_e : steady.alpha_g;
    // The trajectory state lives in the dispersive frame; the master equation
    // takes the same state mapped back to the bare basis.
    const auto rho0 = product_state(dims, ket, alpha);
    o.set = run_full_trajectories(dims, c.system, rho0, times, hc);
    const auto u = dispersive_unitary(dims, c.system.lambda());
    EvolveOptions eo;
    eo.integrator.rtol = c.rtol;
    eo.integrator.atol = c.atol;
    eo.dispersive.qubit_drive_line = false;
    for (const auto& s : evolve(ModelTier::dispersive, dims, c.system, u * rho0 * u.adjoint(), times, eo).samples)
      o.master_equation.bloch.push_back(bloch_vector(s.qubit_dispersive));
  }
  for (std::size_t k = 0; k < times.size(); ++k)
    o.max_deviation = std::max(o.max_deviation, bloch_distance(o.set.ensemble_mean[k], o.master_equation.bloch[k]));
  return o;
}

TelegraphOutcome run_telegraph(const ExperimentConfig& c) {
  const auto& h = c.homodyne;
  const ReducedModel m(c.system, ReducedVariant::nonlinear);
  const auto s = m.pointer_steady_state();
  TelegraphOutcome o;
  o.phi = h.phi.value_or(optimal_lo_phase(m, s));
  const auto mr = measurement_rates_unchecked(m, s, o.phi, h.eta);
  if (!(mr.gamma_ci > 0)) throw ConfigError(c.source + ": [homodyne] telegraph mode needs a measurement drive and eta > 0");
  o.window = h.telegraph_window > 0 ? h.telegraph_window : 10.0 / mr.gamma_ci;
  const double dt = h.dt > 0 ? h.dt : default_qte_step(m, s, o.phi, h.eta);
  o.rates = m.rates(0.0, s);
  o.stats = telegraph_statistics(m, s, h.telegraph_duration, o.phi, h.eta, dt, o.window, h.threshold, c.seed, h.bins);
  // The opening stretch of the same record, for plotting.
  auto rng = trajectory_rng(c.seed, 0);
  Qubit2 rho = Qubit2::Zero();
  rho(0, 0) = 1.0;
  const double span = std::min(h.telegraph_duration, c.duration);
  const long stride = std::max(1L, std::lround(span / dt / std::max(c.samples - 1, 1)));
  long step = 0;
  simulate_reduced_trajectory(m, rho, s, 0.0, span, dt, o.phi, h.eta, rng,
                              [&](double t, const Qubit2& r, const MeasurementRates&, double) {
                                if (++step % stride) return;
                                o.trace_t.push_back(t);
                                o.trace_sz.push_back((r(1, 1) - r(0, 0)).real());
                              });
  return o;
}

Artifacts trajectory_artifacts(const ExperimentConfig& c, const TrajectoryOutcome& o) {
  Artifacts a;
  a.fock_levels_max = o.fock_levels;
  const auto& t = o.set.times;
  CsvTable ens("ensemble", {"t_us", "sx_mean", "sy_mean", "sz_mean", "sx_me", "sy_me", "sz_me", "deviation"});
  PlotSeries mean{"ensemble mean sz", t, {}}, me{"master equation sz", t, {}, false, true};
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& b = o.set.ensemble_mean[k];
    const auto& r = o.master_equation.bloch[k];
    ens.row() << t[k] << b.x << b.y << b.z << r.x << r.y << r.z << bloch_distance(b, r);
    mean.y.push_back(b.z);
    me.y.push_back(r.z);
  }
  CsvTable tr("trajectories", {"trajectory", "t_us", "sx", "sy", "sz", "record"});
  Plot p{"Conditioned trajectories (" + o.tier + ")", kTimeLabel, "<sigma_z>", {}};
  const int keep = std::min<int>(c.homodyne.keep, static_cast<int>(o.set.bloch.size()));
  for (int j = 0; j < keep; ++j) {
    PlotSeries s{"trajectory " + std::to_string(j), t, {}};
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& b = o.set.bloch[j][k];
      tr.row() << j << t[k] << b.x << b.y << b.z << o.set.record[j][k];
      s.y.push_back(b.z);
    }
    p.series.push_back(std::move(s));
  }
  p.series.push_back(std::move(mean));
  p.series.push_back(std::move(me));
  a.tables.push_back(std::move(ens));
  a.tables.push_back(std::move(tr));
  a.plots.emplace_back("trajectories", std::move(p));
  a.results = {{"tier", o.tier},
               {"trajectories", o.set.bloch.size()},
               {"dt_us", o.set.dt},
               {"phi_rad", o.phi},
               {"max_deviation", o.max_deviation}};
  return a;
}

Artifacts telegraph_artifacts(const ExperimentConfig&, const TelegraphOutcome& o) {
  Artifacts a;
  CsvTable hist("telegraph_histogram", {"bin_center", "density"});
  const double width = 2.0 / static_cast<double>(o.stats.histogram.size());
  PlotSeries hs{"smoothed <sigma_z>", o.stats.bin_centers, {}, true};
  for (std::size_t b = 0; b < o.stats.histogram.size(); ++b) {
    hist.row() << o.stats.bin_centers[b] << o.stats.histogram[b] / width;
    hs.y.push_back(o.stats.histogram[b] / width);
  }
  CsvTable dwell("telegraph_dwell", {"state", "dwell_us"});
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? kNaN : s / static_cast<double>(v.size());
  };
  for (double d : o.stats.up_dwell) dwell.row() << "excited" << d;
  for (double d : o.stats.down_dwell) dwell.row() << "ground" << d;
  CsvTable trace("telegraph_trace", {"t_us", "sz"});
  for (std::size_t k = 0; k < o.trace_t.size(); ++k) trace.row() << o.trace_t[k] << o.trace_sz[k];
  a.tables.push_back(std::move(hist));
  a.tables.push_back(std::move(dwell));
  a.tables.push_back(std::move(trace));
  a.plots.emplace_back("telegraph_histogram",
                       Plot{"Histogram of the smoothed conditioned <sigma_z>", "<sigma_z>", "density", {hs}});
  a.plots.emplace_back("telegraph_trace",
                       Plot{"Conditioned <sigma_z>", kTimeLabel, "<sigma_z>", {{"trajectory", o.trace_t, o.trace_sz}}});
  a.results = {{"jumps", o.stats.jumps},
               {"window_us", o.window},
               {"phi_rad", o.phi},
               {"mean_excited_dwell_us", mean(o.stats.up_dwell)},
               {"mean_ground_dwell_us", mean(o.stats.down_dwell)},
               {"inverse_gamma_down_us", 1.0 / o.rates.gamma_down},
               {"inverse_gamma_up_us", 1.0 / o.rates.gamma_up}};
  return a;
}

void write_artifacts(const std::string& dir, const std::string& command, const ExperimentConfig& c,
                     const Artifacts& a) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const std::string& name) { return (std::filesystem::path(dir) / name).string(); };
  nlohmann::json files = nlohmann::json::array();
  for (const auto& t : a.tables) {
    t.write(path(t.name() + ".csv"));
    files.push_back(t.name() + ".csv");
  }
  if (c.svg) {
    for (const auto& [name, plot] : a.plots) {
      write_svg(plot, path(name + ".svg"));
      files.push_back(name + ".svg");
    }
  }
  write_text(path("resolved.cfg"), to_ini(c.table));
  files.push_back("resolved.cfg");

  nlohmann::json m;
  m["schema"] = std::string("cqed-manifest/") + kSchemaVersion;
  m["command"] = command;
  m["seed"] = c.seed;
  m["config"] = c.table;
  auto derived = to_json(derive(c.system));
  derived["fock_levels_max"] = a.fock_levels_max;
  m["derived"] = derived;
  m["results"] = a.results;
  m["files"] = files;
  write_text(path("manifest.json"), m.dump(2) + "\n");
}

}  // namespace cqed::cli
