#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "subrad/dynamics.hpp"
#include "subrad/observables.hpp"
#include "subrad/spectral.hpp"

// Turn-key experiment presets (single-site ring release, subradiant ring
// packet, open-chain edge release, adiabatic freezing, direction
// switching) and disorder-ensemble orchestration. The geometry-
// parameterized cores are shared between the clean presets and the
// per-realization ensemble runs, so a zero-disorder ensemble reproduces
// the clean run bit for bit.

namespace subrad {

// Stretched sampling grid: dense at early times (where the superradiant
// transient makes P_sur curve sharply), geometrically relaxing to dt_max.
struct SampleGrid {
  double dt0 = 2e-4;
  double growth = 1.02;
  double dt_max = 0.02;

  std::vector<double> build(double t0, double t1) const {
    if (!(t1 > t0)) throw std::invalid_argument("SampleGrid: empty span");
    std::vector<double> times;
    times.push_back(t0);
    double dt = dt0;
    double t = t0;
    while (t < t1 - 1e-12) {
      t = std::min(t + dt, t1);
      times.push_back(t);
      dt = std::min(dt * growth, dt_max);
    }
    return times;
  }
};

inline std::vector<double> merge_grids(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double next;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      next = a[i++];
    else
      next = b[j++];
    if (out.empty() || next > out.back() + 1e-12) out.push_back(next);
  }
  return out;
}

struct PresetOptions {
  SampleGrid grid;
  Engine engine = Engine::Spectral;
  int pop_stride = 20;
};

// ---------------------------------------------------------------------------
// Geometry-parameterized cores
// ---------------------------------------------------------------------------

// Excitation released on one site under the time-independent operators.
inline TimeSeries run_localized_release(const Geometry& g, double t_final,
                                        const PresetOptions& options,
                                        bool noninteracting = false,
                                        int site = 0) {
  const Operators ops = noninteracting ? assemble_noninteracting(g) : assemble(g);
  const auto times = options.grid.build(0.0, t_final);
  const EvolutionResult result = evolve_const(init_localized(g, site, kLevelZero),
                                              ops, t_final, times, options.engine);
  return make_series(result, g, options.pop_stride);
}

// Gaussian packet released on a ring.
inline TimeSeries run_packet_release(const Geometry& g, int k_center, double sigma_ka,
                                     double t_final, const PresetOptions& options,
                                     PacketInfo* info = nullptr) {
  const Operators ops = assemble(g);
  const ExcitationState initial =
      init_gaussian_packet(g, k_center, sigma_ka, kLevelZero, info);
  const auto times = options.grid.build(0.0, t_final);
  const EvolutionResult result =
      evolve_const(initial, ops, t_final, times, options.engine);
  return make_series(result, g, options.pop_stride);
}

struct FreezeParams {
  double delta = 1e3;
  double t_min = 0.0;    // ramp start (must be resolved before calling the core)
  double tau = 0.05;     // ramp duration
  double theta_f = 0.0;  // target angle
  double t_final = 10.0;
  SampleGrid grid;
  int pop_stride = 20;
  int rebuilds_per_ramp = 200;
};

inline TimeSeries run_freeze_schedule(const Geometry& g, const FreezeParams& p) {
  if (!(p.t_min > 0.0 && p.t_min + p.tau < p.t_final))
    throw std::invalid_argument("freeze: switch does not fit inside the run");
  FieldSchedule schedule = FieldSchedule::constant(M_PI / 2.0, p.delta, p.t_min);
  schedule.ramp_to(p.theta_f, p.tau, p.delta).hold_until(p.t_final, p.delta);

  const SampleGrid ramp_grid{p.tau / 200.0, 1.0, p.tau / 200.0};
  const auto times = merge_grids(p.grid.build(0.0, p.t_final),
                                 ramp_grid.build(p.t_min, p.t_min + p.tau));
  ScheduledOptions scheduled;
  scheduled.rebuilds_per_ramp = p.rebuilds_per_ramp;
  const EvolutionResult result =
      evolve_scheduled(init_localized(g, 0, kLevelZero), g, schedule, times, scheduled);
  return make_series(result, g, p.pop_stride);
}

struct SwitchParams {
  double delta = 1e3;
  double tau = 0.05;
  double theta_r = 0.0;               // sign-flip angle
  std::vector<double> switch_times;   // start of each ramp
  double t_final = 10.0;
  SampleGrid grid;
  int pop_stride = 20;
  int rebuilds_per_ramp = 200;
};

inline TimeSeries run_switch_schedule(const Geometry& g, const SwitchParams& p) {
  for (std::size_t i = 0; i < p.switch_times.size(); ++i) {
    if (p.switch_times[i] <= (i == 0 ? 0.0 : p.switch_times[i - 1] + p.tau))
      throw std::invalid_argument("direction_switch: switch times overlap");
    if (p.switch_times[i] + p.tau >= p.t_final)
      throw std::invalid_argument("direction_switch: switch beyond t_final");
  }
  auto times = p.grid.build(0.0, p.t_final);
  if (p.switch_times.empty()) {
    const Operators ops = assemble(g, ZeemanField::along_axis(p.delta));
    const EvolutionResult result = evolve_const(init_localized(g, 0, kLevelZero),
                                                ops, p.t_final, times,
                                                Engine::Spectral);
    return make_series(result, g, p.pop_stride);
  }
  FieldSchedule schedule =
      FieldSchedule::constant(M_PI / 2.0, p.delta, p.switch_times.front());
  bool at_flip = false;
  const SampleGrid ramp_grid{p.tau / 200.0, 1.0, p.tau / 200.0};
  for (std::size_t i = 0; i < p.switch_times.size(); ++i) {
    schedule.ramp_to(at_flip ? M_PI / 2.0 : p.theta_r, p.tau, p.delta);
    at_flip = !at_flip;
    const double next =
        (i + 1 < p.switch_times.size()) ? p.switch_times[i + 1] : p.t_final;
    schedule.hold_until(next, p.delta);
    times = merge_grids(times,
                        ramp_grid.build(p.switch_times[i], p.switch_times[i] + p.tau));
  }
  ScheduledOptions scheduled;
  scheduled.rebuilds_per_ramp = p.rebuilds_per_ramp;
  const EvolutionResult result =
      evolve_scheduled(init_localized(g, 0, kLevelZero), g, schedule, times, scheduled);
  return make_series(result, g, p.pop_stride);
}

// ---------------------------------------------------------------------------
// Presets (clean geometries + summary)
// ---------------------------------------------------------------------------

struct PresetResult {
  TimeSeries series;
  nlohmann::json summary;
};

namespace detail {

// Common summary block: plateau, transport scale, fitted decay rate.
inline nlohmann::json summarize(const TimeSeries& s) {
  nlohmann::json j;
  const PlateauStats plateau = plateau_stats(s);
  j["plateau"] = {{"present", plateau.present},
                  {"value", plateau.value},
                  {"t_start", plateau.t_start},
                  {"t_end", plateau.t_end}};
  j["t_pl"] = plateau.t_pl;
  j["t_pl_from_crossing"] = plateau.t_pl_from_crossing;

  double t_b = s.times.back();
  if (s.topology == Topology::OpenChain) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.com[i] >= s.n - 1.5) {
        t_b = s.times[i];
        break;
      }
    }
  }
  // Fit from the post-transient marker; when the activity decays
  // monotonically (no minimum exists) use the second half of the window.
  double t_a = s.times.front() + 0.5 * (t_b - s.times.front());
  if (const auto min_index = first_activity_minimum(s, 5)) {
    if (s.times[*min_index] < t_b) t_a = s.times[*min_index];
  }
  j["fit_window"] = {t_a, t_b};
  if (t_b > t_a && s.p_sur.back() > 0.0)
    j["gamma_eff"] = effective_decay_rate(s, t_a, t_b);
  else
    j["gamma_eff"] = nullptr;
  j["balance_residual"] = balance_residual(s);
  j["max_activity"] = *std::max_element(s.activity.begin(), s.activity.end());
  return j;
}

}  // namespace detail

// Single excitation released on one site of a clean ring.
inline PresetResult preset_ring_single_site(int n, double a_over_lambda,
                                            double t_final,
                                            const PresetOptions& options = {}) {
  const Geometry g = build_ring(n, a_over_lambda);
  PresetResult out;
  out.series = run_localized_release(g, t_final, options);
  out.summary = detail::summarize(out.series);
  out.summary["preset"] = "ring_single_site";
  return out;
}

// Gaussian wave packet in the subradiant linear-dispersion region of a
// clean ring.
inline PresetResult preset_ring_packet(int n, double a_over_lambda, int k_center,
                                       double sigma_ka, double t_final,
                                       const PresetOptions& options = {}) {
  const Geometry g = build_ring(n, a_over_lambda);
  PacketInfo info;
  PresetResult out;
  out.series = run_packet_release(g, k_center, sigma_ka, t_final, options, &info);
  out.summary = detail::summarize(out.series);
  out.summary["preset"] = "ring_packet";
  out.summary["k_center"] = k_center;
  out.summary["sigma_ka"] = sigma_ka;
  out.summary["packet_truncated_weight"] = info.truncated_weight;
  out.summary["packet_truncation_warning"] = info.truncation_warning;
  return out;
}

// Excitation released on the edge of an open chain; optionally with all
// interatomic couplings removed (independent-atom control).
inline PresetResult preset_chain_edge(int n, double a_over_lambda, double t_final,
                                      bool noninteracting = false,
                                      const PresetOptions& options = {}) {
  const Geometry g = build_chain(n, a_over_lambda);
  PresetResult out;
  out.series = run_localized_release(g, t_final, options, noninteracting);
  out.summary = detail::summarize(out.series);
  out.summary["preset"] = "chain_edge";
  out.summary["noninteracting"] = noninteracting;
  return out;
}

struct FreezeOptions {
  double delta = 1e3;                 // Zeeman splitting (gamma units)
  std::optional<double> t_min;        // switch trigger; detected if absent
  std::optional<double> tau;          // ramp duration; default 50 / delta
  double t_final = 10.0;
  SampleGrid grid;
  int pop_stride = 20;
  int rebuilds_per_ramp = 200;
};

// Chain-edge release; when the activity reaches its first minimum the
// quantization axis is ramped linearly from pi/2 to the magic angle
// (vanishing nearest-neighbor coherent coupling), freezing the packet in
// the subradiant bulk.
inline PresetResult preset_freeze(int n, double a_over_lambda,
                                  const FreezeOptions& options = {}) {
  const Geometry g = build_chain(n, a_over_lambda);
  FreezeParams params;
  params.delta = options.delta;
  params.tau = options.tau.value_or(50.0 / options.delta);
  params.theta_f = magic_angle(2.0 * M_PI * a_over_lambda);
  params.t_final = options.t_final;
  params.grid = options.grid;
  params.pop_stride = options.pop_stride;
  params.rebuilds_per_ramp = options.rebuilds_per_ramp;

  PresetResult out;
  out.summary["theta_f"] = params.theta_f;
  out.summary["tau"] = params.tau;
  out.summary["delta"] = params.delta;
  out.summary["delta_warning"] = params.delta < 100.0;

  if (options.t_min) {
    params.t_min = *options.t_min;
    out.summary["t_min_detected"] = false;
  } else {
    // Probe run without the switch to locate the activity minimum.
    PresetOptions probe_options;
    probe_options.grid = options.grid;
    probe_options.pop_stride = 1000;
    const TimeSeries probe = run_localized_release(g, options.t_final, probe_options);
    const auto min_index = first_activity_minimum(probe, 5);
    if (!min_index)
      throw NumericalError("preset_freeze: no activity minimum found to trigger the switch");
    params.t_min = probe.times[*min_index];
    out.summary["t_min_detected"] = true;
  }
  out.summary["t_min"] = params.t_min;

  out.series = run_freeze_schedule(g, params);
  out.summary.update(detail::summarize(out.series));
  out.summary["preset"] = "freeze";
  return out;
}

struct DirectionSwitchOptions {
  double delta = 1e3;
  std::vector<double> switch_times;
  std::optional<double> tau;
  double t_final = 10.0;
  SampleGrid grid;
  int pop_stride = 20;
  int rebuilds_per_ramp = 200;
};

// Chain-edge release with the axis toggled between pi/2 and the
// sign-flip angle (nearest-neighbor coupling negated), reversing the
// packet's direction of travel at every switch.
inline PresetResult preset_direction_switch(int n, double a_over_lambda,
                                            const DirectionSwitchOptions& options) {
  const Geometry g = build_chain(n, a_over_lambda);
  const SignFlipAngle flip = sign_flip_angle(2.0 * M_PI * a_over_lambda);
  SwitchParams params;
  params.delta = options.delta;
  params.tau = options.tau.value_or(50.0 / options.delta);
  params.theta_r = flip.theta;
  params.switch_times = options.switch_times;
  params.t_final = options.t_final;
  params.grid = options.grid;
  params.pop_stride = options.pop_stride;
  params.rebuilds_per_ramp = options.rebuilds_per_ramp;

  PresetResult out;
  out.series = run_switch_schedule(g, params);
  out.summary = detail::summarize(out.series);
  out.summary["preset"] = "direction_switch";
  out.summary["theta_r"] = flip.theta;
  out.summary["theta_r_exact"] = flip.exact;
  out.summary["v00_achieved"] = flip.achieved;
  out.summary["v00_target"] = flip.target;
  out.summary["tau"] = params.tau;
  out.summary["switch_times"] = params.switch_times;
  return out;
}

// ---------------------------------------------------------------------------
// Disorder ensembles
// ---------------------------------------------------------------------------

struct EnsembleSpec {
  Geometry base;
  double sigma_over_a = 0.0;
  int realizations = 1;
  std::uint64_t seed = 1;
};

struct EnsembleResult {
  TimeSeries mean;
  std::vector<double> ipr;  // per realization, of the time-averaged profile
  double mean_ipr = 0.0;
  std::vector<TimeSeries> realizations;  // kept only on request
};

namespace detail {

// Running mean in realization-index order: deterministic, independent of
// completion order, and exact when every input is identical.
inline void mean_accumulate(TimeSeries& mean, const TimeSeries& sample, int index) {
  if (index == 0) {
    mean = sample;
    return;
  }
  if (mean.size() != sample.size() ||
      mean.populations.size() != sample.populations.size())
    throw std::invalid_argument("ensemble: realization grids differ");
  const double w = 1.0 / (index + 1);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean.p_sur[i] += (sample.p_sur[i] - mean.p_sur[i]) * w;
    mean.activity[i] += (sample.activity[i] - mean.activity[i]) * w;
    mean.com[i] += (sample.com[i] - mean.com[i]) * w;
    mean.width[i] += (sample.width[i] - mean.width[i]) * w;
  }
  for (std::size_t i = 0; i < mean.populations.size(); ++i)
    mean.populations[i] += (sample.populations[i] - mean.populations[i]) * w;
}

}  // namespace detail

// Run the protocol once per disorder realization (each on its own RNG
// stream derived from (seed, index)) and average the observables
// pointwise. Realizations may execute on several threads; the reduction is
// always in realization-index order.
inline EnsembleResult run_ensemble(
    const EnsembleSpec& spec,
    const std::function<TimeSeries(const Geometry&)>& runner, int threads = 1,
    bool keep_realizations = false) {
  if (spec.realizations < 1)
    throw std::invalid_argument("run_ensemble: need at least one realization");
  std::vector<TimeSeries> results(spec.realizations);

  auto work = [&](int index) {
    const Geometry g = sample_disordered(
        spec.base, spec.sigma_over_a,
        rng::stream_seed(spec.seed, static_cast<std::uint64_t>(index)));
    results[index] = runner(g);
  };

  if (threads <= 1 || spec.realizations == 1) {
    for (int i = 0; i < spec.realizations; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, spec.realizations);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < spec.realizations; i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }

  EnsembleResult out;
  for (int i = 0; i < spec.realizations; ++i) {
    detail::mean_accumulate(out.mean, results[i], i);
    out.ipr.push_back(
        inverse_participation_ratio(time_averaged_site_populations(results[i])));
    out.mean_ipr += (out.ipr.back() - out.mean_ipr) / (i + 1);
  }
  if (keep_realizations) out.realizations = std::move(results);
  return out;
}

}  // namespace subrad
