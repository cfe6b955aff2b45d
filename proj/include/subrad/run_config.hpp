#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subrad/protocols.hpp"

// Parsed preset configuration for the command-line front end. JSON schema
// (defaults in parentheses):
//
// {
//   "preset": "ring_single_site" | "ring_packet" | "chain_edge"
//           | "freeze" | "direction_switch",
//   "n": int, "a_over_lambda": float,
//   "delta_over_gamma": float (1000, field protocols only),
//   "sigma_over_a": float (0), "realizations": int (1), "seed": int (1),
//   "t_final": float, "sample_dt": float (0.02),
//   "pop_stride": int (20),
//   "k_center": int (ring_packet), "sigma_ka": float (ring_packet),
//   "noninteracting": bool (false, chain_edge),
//   "engine": "spectral" | "integrator" ("spectral"),
//   "save_realizations": bool (false),
//   "switch": { "t_min": float | null, "tau": float | null,
//               "times": [float, ...] }
// }
//
// sample_dt caps the stretched sampling grid; sampling is denser at early
// times to resolve the superradiant transient.

namespace subrad {

struct RunConfig {
  std::string preset;
  int n = 0;
  double a_over_lambda = 0.0;
  double delta_over_gamma = 1000.0;
  double sigma_over_a = 0.0;
  int realizations = 1;
  std::uint64_t seed = 1;
  double t_final = 0.0;
  double sample_dt = 0.02;
  int pop_stride = 20;
  int k_center = 0;
  double sigma_ka = 0.0;
  bool noninteracting = false;
  std::string engine = "spectral";
  bool save_realizations = false;
  std::optional<double> switch_t_min;
  std::optional<double> switch_tau;
  std::vector<double> switch_times;

  Engine engine_kind() const {
    return engine == "integrator" ? Engine::Integrator : Engine::Spectral;
  }

  void validate() const {
    static const char* presets[] = {"ring_single_site", "ring_packet", "chain_edge",
                                    "freeze", "direction_switch"};
    bool known = false;
    for (const char* p : presets) known = known || preset == p;
    if (!known) throw std::invalid_argument("config: unknown preset '" + preset + "'");
    if (n < 1) throw std::invalid_argument("config: n must be positive");
    if (!(a_over_lambda > 0.0))
      throw std::invalid_argument("config: a_over_lambda must be positive");
    if (!(t_final > 0.0)) throw std::invalid_argument("config: t_final must be positive");
    if (!(sample_dt > 0.0))
      throw std::invalid_argument("config: sample_dt must be positive");
    if (realizations < 1)
      throw std::invalid_argument("config: realizations must be >= 1");
    if (sigma_over_a < 0.0)
      throw std::invalid_argument("config: sigma_over_a must be >= 0");
    if (pop_stride < 1) throw std::invalid_argument("config: pop_stride must be >= 1");
    if (engine != "spectral" && engine != "integrator")
      throw std::invalid_argument("config: engine must be 'spectral' or 'integrator'");
    if (preset == "ring_packet" && !(sigma_ka > 0.0))
      throw std::invalid_argument("config: ring_packet needs sigma_ka > 0");
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.preset = j.at("preset").get<std::string>();
    c.n = j.at("n").get<int>();
    c.a_over_lambda = j.at("a_over_lambda").get<double>();
    c.t_final = j.at("t_final").get<double>();
    c.delta_over_gamma = j.value("delta_over_gamma", c.delta_over_gamma);
    c.sigma_over_a = j.value("sigma_over_a", 0.0);
    c.realizations = j.value("realizations", 1);
    c.seed = j.value("seed", std::uint64_t{1});
    c.sample_dt = j.value("sample_dt", c.sample_dt);
    c.pop_stride = j.value("pop_stride", c.pop_stride);
    c.k_center = j.value("k_center", 0);
    c.sigma_ka = j.value("sigma_ka", 0.0);
    c.noninteracting = j.value("noninteracting", false);
    c.engine = j.value("engine", std::string("spectral"));
    c.save_realizations = j.value("save_realizations", false);
    if (j.contains("switch")) {
      const auto& sw = j.at("switch");
      if (sw.contains("t_min") && !sw.at("t_min").is_null())
        c.switch_t_min = sw.at("t_min").get<double>();
      if (sw.contains("tau") && !sw.at("tau").is_null())
        c.switch_tau = sw.at("tau").get<double>();
      if (sw.contains("times"))
        c.switch_times = sw.at("times").get<std::vector<double>>();
    }
    c.validate();
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"preset", preset},
                     {"n", n},
                     {"a_over_lambda", a_over_lambda},
                     {"delta_over_gamma", delta_over_gamma},
                     {"sigma_over_a", sigma_over_a},
                     {"realizations", realizations},
                     {"seed", seed},
                     {"t_final", t_final},
                     {"sample_dt", sample_dt},
                     {"pop_stride", pop_stride},
                     {"engine", engine},
                     {"save_realizations", save_realizations}};
    if (preset == "ring_packet") {
      j["k_center"] = k_center;
      j["sigma_ka"] = sigma_ka;
    }
    if (preset == "chain_edge") j["noninteracting"] = noninteracting;
    if (preset == "freeze" || preset == "direction_switch") {
      nlohmann::json sw;
      sw["t_min"] = switch_t_min ? nlohmann::json(*switch_t_min) : nlohmann::json();
      sw["tau"] = switch_tau ? nlohmann::json(*switch_tau) : nlohmann::json();
      sw["times"] = switch_times;
      j["switch"] = sw;
    }
    return j;
  }

  SampleGrid grid() const {
    SampleGrid g;
    g.dt_max = sample_dt;
    g.dt0 = std::min(2e-4, sample_dt);
    return g;
  }

  PresetOptions preset_options() const {
    PresetOptions o;
    o.grid = grid();
    o.engine = engine_kind();
    o.pop_stride = pop_stride;
    return o;
  }
};

struct RunOutput {
  TimeSeries series;  // the mean series for ensembles
  nlohmann::json summary;
  std::vector<TimeSeries> realization_series;  // kept when save_realizations
};

// One run of the configured protocol on a concrete geometry; used directly
// by disorder ensembles and shared with the clean presets.
inline TimeSeries run_config_on_geometry(const RunConfig& c, const Geometry& g) {
  if (c.preset == "ring_single_site")
    return run_localized_release(g, c.t_final, c.preset_options());
  if (c.preset == "chain_edge")
    return run_localized_release(g, c.t_final, c.preset_options(), c.noninteracting);
  if (c.preset == "ring_packet")
    return run_packet_release(g, c.k_center, c.sigma_ka, c.t_final, c.preset_options());
  if (c.preset == "freeze") {
    if (!c.switch_t_min)
      throw std::invalid_argument(
          "config: freeze ensembles need an explicit switch.t_min");
    FreezeParams p;
    p.delta = c.delta_over_gamma;
    p.t_min = *c.switch_t_min;
    p.tau = c.switch_tau.value_or(50.0 / c.delta_over_gamma);
    p.theta_f = magic_angle(2.0 * M_PI * c.a_over_lambda);
    p.t_final = c.t_final;
    p.grid = c.grid();
    p.pop_stride = c.pop_stride;
    return run_freeze_schedule(g, p);
  }
  if (c.preset == "direction_switch") {
    SwitchParams p;
    p.delta = c.delta_over_gamma;
    p.tau = c.switch_tau.value_or(50.0 / c.delta_over_gamma);
    p.theta_r = sign_flip_angle(2.0 * M_PI * c.a_over_lambda).theta;
    p.switch_times = c.switch_times;
    p.t_final = c.t_final;
    p.grid = c.grid();
    p.pop_stride = c.pop_stride;
    return run_switch_schedule(g, p);
  }
  throw std::invalid_argument("config: unknown preset '" + c.preset + "'");
}

inline Geometry base_geometry(const RunConfig& c) {
  if (c.preset == "ring_single_site" || c.preset == "ring_packet")
    return build_ring(c.n, c.a_over_lambda);
  return build_chain(c.n, c.a_over_lambda);
}

// Execute a configured run: a single clean preset, or a disorder ensemble
// whose per-realization runs share the clean code path.
inline RunOutput execute_run(const RunConfig& c, int threads = 1) {
  c.validate();
  RunOutput out;
  const bool ensemble = c.realizations > 1 || c.sigma_over_a > 0.0;
  if (!ensemble) {
    PresetResult preset;
    if (c.preset == "ring_single_site") {
      preset = preset_ring_single_site(c.n, c.a_over_lambda, c.t_final,
                                       c.preset_options());
    } else if (c.preset == "ring_packet") {
      preset = preset_ring_packet(c.n, c.a_over_lambda, c.k_center, c.sigma_ka,
                                  c.t_final, c.preset_options());
    } else if (c.preset == "chain_edge") {
      preset = preset_chain_edge(c.n, c.a_over_lambda, c.t_final, c.noninteracting,
                                 c.preset_options());
    } else if (c.preset == "freeze") {
      FreezeOptions o;
      o.delta = c.delta_over_gamma;
      o.t_min = c.switch_t_min;
      o.tau = c.switch_tau;
      o.t_final = c.t_final;
      o.grid = c.grid();
      o.pop_stride = c.pop_stride;
      preset = preset_freeze(c.n, c.a_over_lambda, o);
    } else {
      DirectionSwitchOptions o;
      o.delta = c.delta_over_gamma;
      o.switch_times = c.switch_times;
      o.tau = c.switch_tau;
      o.t_final = c.t_final;
      o.grid = c.grid();
      o.pop_stride = c.pop_stride;
      preset = preset_direction_switch(c.n, c.a_over_lambda, o);
    }
    out.series = std::move(preset.series);
    out.summary = std::move(preset.summary);
    out.summary["realizations"] = 1;
    out.summary["sigma_over_a"] = c.sigma_over_a;
    return out;
  }

  EnsembleSpec spec;
  spec.base = base_geometry(c);
  spec.sigma_over_a = c.sigma_over_a;
  spec.realizations = c.realizations;
  spec.seed = c.seed;
  EnsembleResult result = run_ensemble(
      spec, [&c](const Geometry& g) { return run_config_on_geometry(c, g); },
      threads, c.save_realizations);
  out.summary = detail::summarize(result.mean);
  out.summary["preset"] = c.preset;
  out.summary["realizations"] = c.realizations;
  out.summary["sigma_over_a"] = c.sigma_over_a;
  out.summary["seed"] = c.seed;
  out.summary["ipr"] = result.ipr;
  out.summary["mean_ipr"] = result.mean_ipr;
  out.series = std::move(result.mean);
  out.realization_series = std::move(result.realizations);
  return out;
}

}  // namespace subrad
