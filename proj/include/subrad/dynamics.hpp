#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "subrad/couplings.hpp"
#include "subrad/geometry.hpp"
#include "subrad/schedule.hpp"

// Single-excitation states and their evolution under the non-Hermitian
// effective Hamiltonian, dc/dt = -i Heff c. Two engines: a dense spectral
// propagator (authoritative for time-independent operators) and a
// fixed-step fourth-order Runge-Kutta integrator with step-halving
// control, which also drives the scheduled (time-dependent) evolution.

namespace subrad {

struct ExcitationState {
  ComplexVector amps;  // 3N amplitudes, flat_index(site, level)
  double time = 0.0;
  int n = 0;
};

inline double survival(const ComplexVector& amps) { return amps.squaredNorm(); }
inline double survival(const ExcitationState& s) { return survival(s.amps); }

// Activity <K> = c^dag Gamma c, the instantaneous photon emission rate.
inline double activity(const ComplexVector& amps, const ComplexMatrix& gamma) {
  if (gamma.rows() != amps.size())
    throw std::invalid_argument("activity: operator/state dimension mismatch");
  return (amps.adjoint() * gamma * amps)(0, 0).real();
}

inline ExcitationState init_localized(const Geometry& g, int site, int level) {
  if (site < 0 || site >= g.size())
    throw std::out_of_range("init_localized: site out of range");
  if (level < 0 || level >= kLevels)
    throw std::out_of_range("init_localized: level out of range");
  ExcitationState s;
  s.n = g.size();
  s.amps = ComplexVector::Zero(kLevels * g.size());
  s.amps(flat_index(site, level)) = 1.0;
  return s;
}

// Unitary ring mode matrix: column j holds the plane wave with winding
// k_j = j - floor(N/2), entries exp[i (2 pi / N) alpha k_j] / sqrt(N).
inline ComplexMatrix ring_mode_matrix(int n) {
  ComplexMatrix u(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    const int winding = j - n / 2;
    for (int alpha = 0; alpha < n; ++alpha)
      u(alpha, j) = std::polar(norm, 2.0 * M_PI * alpha * winding / n);
  }
  return u;
}

// One internal level of a 3N state as an N-vector (and back).
inline ComplexVector level_sector(const ComplexVector& amps, int level) {
  const int n = static_cast<int>(amps.size()) / kLevels;
  ComplexVector out(n);
  for (int site = 0; site < n; ++site) out(site) = amps(flat_index(site, level));
  return out;
}

inline ComplexVector to_momentum(const ComplexVector& sector_amps) {
  const int n = static_cast<int>(sector_amps.size());
  return ring_mode_matrix(n).adjoint() * sector_amps;
}

inline ComplexVector from_momentum(const ComplexVector& mode_amps) {
  const int n = static_cast<int>(mode_amps.size());
  return ring_mode_matrix(n) * mode_amps;
}

struct PacketInfo {
  double truncated_weight = 0.0;  // Gaussian probability mass outside the zone
  bool truncation_warning = false;
};

// Gaussian wave packet on a ring, centered at winding k_center in
// momentum space with width sigma_k (sigma_ka = sigma_k * a), then
// normalized to unit norm exactly.
inline ExcitationState init_gaussian_packet(const Geometry& g, int k_center,
                                            double sigma_ka, int level = kLevelZero,
                                            PacketInfo* info = nullptr) {
  if (g.topology != Topology::Ring)
    throw std::invalid_argument("init_gaussian_packet: ring topology required");
  if (!(sigma_ka > 0.0))
    throw std::invalid_argument("init_gaussian_packet: sigma_k must be positive");
  const int n = g.size();
  const double p_center = 2.0 * M_PI * k_center / n;
  ComplexVector modes(n);
  for (int j = 0; j < n; ++j) {
    const double p = 2.0 * M_PI * (j - n / 2) / n;
    const double d = p - p_center;
    modes(j) = std::exp(-d * d / (4.0 * sigma_ka * sigma_ka));
  }
  ComplexVector sector = from_momentum(modes);
  sector /= sector.norm();

  ExcitationState s;
  s.n = n;
  s.amps = ComplexVector::Zero(kLevels * n);
  for (int site = 0; site < n; ++site) s.amps(flat_index(site, level)) = sector(site);

  if (info) {
    // Probability mass of the continuum Gaussian lost to zone-edge truncation.
    const double z = std::sqrt(2.0) * sigma_ka;
    info->truncated_weight = 0.5 * (std::erfc((M_PI - p_center) / z) +
                                    std::erfc((M_PI + p_center) / z));
    info->truncation_warning = info->truncated_weight > 0.01;
  }
  return s;
}

inline double operator_inf_norm(const ComplexMatrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

struct IntegratorDiagnostics {
  long steps = 0;
  double step = 0.0;        // final step size used
  int halvings = 0;
  double last_change = 0.0; // state change across the last halving
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<ComplexVector> states;
  std::vector<double> survival;
  std::vector<double> activity;  // with the generator-consistent Gamma(t)
  IntegratorDiagnostics diag;
};

enum class Engine { Spectral, Integrator };

// Dense eigendecomposition propagator: c(t0 + dt) = S exp(-i L dt) S^-1 c(t0).
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const ComplexMatrix& heff) {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(heff);
    if (solver.info() != Eigen::Success)
      throw NumericalError("SpectralPropagator: eigendecomposition failed");
    eigenvalues_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
    lu_.compute(vectors_);
  }

  ComplexVector at(const ComplexVector& c0, double dt) const {
    ComplexVector w = lu_.solve(c0);
    for (int i = 0; i < w.size(); ++i)
      w(i) *= std::exp(Complex(0.0, -1.0) * eigenvalues_(i) * dt);
    return vectors_ * w;
  }

  const ComplexVector& eigenvalues() const { return eigenvalues_; }

 private:
  ComplexVector eigenvalues_;
  ComplexMatrix vectors_;
  Eigen::PartialPivLU<ComplexMatrix> lu_;
};

namespace detail {

// Classic RK4 with a fixed number of equal steps over the span.
inline long rk4_advance(const ComplexMatrix& minus_i_h, ComplexVector& c,
                        double t_span, double max_step) {
  if (t_span <= 0.0) return 0;
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(t_span / max_step)));
  const double h = t_span / steps;
  ComplexVector k1, k2, k3, k4, tmp;
  for (long i = 0; i < steps; ++i) {
    k1.noalias() = minus_i_h * c;
    tmp = c + (0.5 * h) * k1;
    k2.noalias() = minus_i_h * tmp;
    tmp = c + (0.5 * h) * k2;
    k3.noalias() = minus_i_h * tmp;
    tmp = c + h * k3;
    k4.noalias() = minus_i_h * tmp;
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return steps;
}

inline void check_sample_times(std::span<const double> times, double t0, double t_final) {
  if (times.empty())
    throw std::invalid_argument("evolve: sample_times must not be empty");
  double prev = t0 - 1e-12;
  for (double t : times) {
    if (!(t > prev))
      throw std::invalid_argument("evolve: sample_times must be strictly increasing and >= start");
    prev = t;
  }
  if (times.back() > t_final + 1e-12)
    throw std::invalid_argument("evolve: sample beyond t_final");
}

inline void check_finite(const ComplexVector& c) {
  if (!c.allFinite())
    throw NumericalError("evolve: non-finite amplitudes (integrator divergence)");
}

}  // namespace detail

// Default step rule: h * |Heff|_inf <= 0.05.
inline double default_rk4_step(const ComplexMatrix& heff) {
  const double norm = operator_inf_norm(heff);
  return norm > 0.0 ? 0.05 / norm : 0.05;
}

inline EvolutionResult evolve_const(const ExcitationState& state, const Operators& ops,
                                    double t_final, std::span<const double> sample_times,
                                    Engine engine = Engine::Spectral) {
  detail::check_sample_times(sample_times, state.time, t_final);
  EvolutionResult result;
  result.times.assign(sample_times.begin(), sample_times.end());
  result.states.reserve(sample_times.size());

  if (engine == Engine::Spectral) {
    const SpectralPropagator propagator(ops.heff);
    for (double t : sample_times) {
      ComplexVector c = propagator.at(state.amps, t - state.time);
      detail::check_finite(c);
      result.states.push_back(std::move(c));
    }
  } else {
    const ComplexMatrix minus_i_h = Complex(0.0, -1.0) * ops.heff;
    double step = default_rk4_step(ops.heff);
    std::vector<ComplexVector> trajectory;
    // Halve the step until the whole sampled trajectory is converged.
    for (int halving = 0;; ++halving) {
      std::vector<ComplexVector> attempt;
      attempt.reserve(sample_times.size());
      ComplexVector c = state.amps;
      double t = state.time;
      long steps = 0;
      for (double ts : sample_times) {
        steps += detail::rk4_advance(minus_i_h, c, ts - t, step);
        t = ts;
        detail::check_finite(c);
        attempt.push_back(c);
      }
      result.diag.steps = steps;
      result.diag.step = step;
      result.diag.halvings = halving;
      if (!trajectory.empty()) {
        double change = 0.0;
        for (std::size_t i = 0; i < attempt.size(); ++i)
          change = std::max(change,
                            (attempt[i] - trajectory[i]).cwiseAbs().maxCoeff());
        result.diag.last_change = change;
        if (change < 1e-9 || halving >= 14) {
          trajectory = std::move(attempt);
          break;
        }
      }
      trajectory = std::move(attempt);
      step *= 0.5;
    }
    result.states = std::move(trajectory);
  }

  for (const auto& c : result.states) {
    result.survival.push_back(survival(c));
    result.activity.push_back(activity(c, ops.gamma));
  }
  return result;
}

struct ScheduledOptions {
  int rebuilds_per_ramp = 200;             // operator rebuild granularity in ramps
  std::optional<double> dt_rebuild;        // override: absolute rebuild interval
  std::optional<double> fixed_step;        // pin the RK4 step (must divide rebuilds)
};

// Time-dependent evolution: Heff(t) is reassembled from the scheduled
// axis angle theta(t) and splitting Delta(t) at every rebuild interval
// (frozen at the interval midpoint); flat segments use the spectral
// propagator on the segment's constant operator.
inline EvolutionResult evolve_scheduled(const ExcitationState& state, const Geometry& g,
                                        const FieldSchedule& schedule,
                                        std::span<const double> sample_times,
                                        const ScheduledOptions& options = {}) {
  const double t_final = schedule.t_end();
  detail::check_sample_times(sample_times, state.time, t_final);
  if (state.time < schedule.t_start() - 1e-12)
    throw std::invalid_argument("evolve_scheduled: state starts before the schedule");

  EvolutionResult result;
  result.times.assign(sample_times.begin(), sample_times.end());

  Geometry scheduled_geometry = g;
  ComplexVector c = state.amps;
  double t = state.time;
  std::size_t next_sample = 0;
  const double t_stop = sample_times.back();

  auto emit_samples_const = [&](const SpectralPropagator& propagator,
                                const ComplexMatrix& gamma, double t_seg_end) {
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= t_seg_end + 1e-12) {
      const double ts = sample_times[next_sample];
      ComplexVector cs = propagator.at(c, ts - t);
      detail::check_finite(cs);
      result.survival.push_back(survival(cs));
      result.activity.push_back(activity(cs, gamma));
      result.states.push_back(std::move(cs));
      ++next_sample;
    }
  };

  for (const ScheduleSegment& seg : schedule.segments()) {
    if (t >= t_stop - 1e-15) break;
    if (seg.t_end <= t + 1e-15) continue;
    const double seg_end = std::min(seg.t_end, t_stop);

    if (seg.flat()) {
      scheduled_geometry.axis = axis_for_theta(seg.theta_start);
      const Operators ops =
          assemble(scheduled_geometry, ZeemanField::along_axis(seg.delta));
      const SpectralPropagator propagator(ops.heff);
      emit_samples_const(propagator, ops.gamma, seg_end);
      c = propagator.at(c, seg_end - t);
      detail::check_finite(c);
      t = seg_end;
      continue;
    }

    // Ramp: subdivide into rebuild intervals with the operator frozen at
    // the interval midpoint.
    double dt_rebuild = options.dt_rebuild.value_or(
        seg.duration() / options.rebuilds_per_ramp);
    if (!(dt_rebuild > 0.0))
      throw std::invalid_argument("evolve_scheduled: rebuild interval must be positive");
    if (options.fixed_step && *options.fixed_step > dt_rebuild + 1e-15)
      throw std::invalid_argument(
          "evolve_scheduled: rebuild interval finer than the integrator step");
    const double ramp_t0 = t;
    const long intervals =
        std::max<long>(1, static_cast<long>(std::ceil((seg_end - ramp_t0) / dt_rebuild)));
    const double interval_len = (seg_end - ramp_t0) / intervals;
    for (long i = 0; i < intervals; ++i) {
      const double t_interval_start = ramp_t0 + i * interval_len;
      const double t_interval_end =
          (i == intervals - 1) ? seg_end : ramp_t0 + (i + 1) * interval_len;
      const double t_mid = 0.5 * (t_interval_start + t_interval_end);
      scheduled_geometry.axis = axis_for_theta(schedule.theta_at(t_mid));
      const Operators ops = assemble(
          scheduled_geometry, ZeemanField::along_axis(schedule.delta_at(t_mid)));
      const ComplexMatrix minus_i_h = Complex(0.0, -1.0) * ops.heff;
      const double step =
          options.fixed_step.value_or(default_rk4_step(ops.heff));
      while (next_sample < sample_times.size() &&
             sample_times[next_sample] <= t_interval_end + 1e-12) {
        const double ts = sample_times[next_sample];
        result.diag.steps += detail::rk4_advance(minus_i_h, c, ts - t, step);
        t = ts;
        detail::check_finite(c);
        result.states.push_back(c);
        result.survival.push_back(survival(c));
        result.activity.push_back(activity(c, ops.gamma));
        ++next_sample;
      }
      result.diag.steps += detail::rk4_advance(minus_i_h, c, t_interval_end - t, step);
      t = t_interval_end;
      detail::check_finite(c);
      result.diag.step = step;
    }
  }
  return result;
}

}  // namespace subrad
