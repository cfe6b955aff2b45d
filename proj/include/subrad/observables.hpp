#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "subrad/couplings.hpp"
#include "subrad/dynamics.hpp"
#include "subrad/geometry.hpp"

// Post-processing of sampled trajectories: survival, activity, packet
// moments, effective decay rates, plateau detection, and the
// activity-survival balance diagnostic.

namespace subrad {

struct PacketMoments {
  double center = 0.0;  // site units (circular mean on a ring)
  double width = 0.0;   // RMS width in site units
};

// Population-weighted packet center and RMS width. Rings use circular
// statistics so the moments are covariant under lattice rotations.
inline PacketMoments packet_moments(const ComplexVector& amps, const Geometry& g) {
  const int n = g.size();
  RealVector pops = RealVector::Zero(n);
  for (int site = 0; site < n; ++site)
    for (int level = 0; level < kLevels; ++level)
      pops(site) += std::norm(amps(flat_index(site, level)));
  const double total = pops.sum();
  if (!(total > 0.0))
    throw std::domain_error("packet_moments: zero-norm state has no moments");

  PacketMoments m;
  if (g.topology == Topology::Ring) {
    Complex z(0.0, 0.0);
    for (int site = 0; site < n; ++site)
      z += pops(site) * std::polar(1.0, 2.0 * M_PI * site / n);
    const double resultant = std::abs(z) / total;
    double center = std::arg(z) * n / (2.0 * M_PI);
    if (center < 0.0) center += n;
    m.center = center;
    if (resultant >= 1.0) {
      m.width = 0.0;
    } else if (resultant <= 0.0) {
      m.width = static_cast<double>(n);
    } else {
      m.width = std::sqrt(-2.0 * std::log(resultant)) * n / (2.0 * M_PI);
    }
  } else {
    double mean = 0.0;
    for (int site = 0; site < n; ++site) mean += site * pops(site);
    mean /= total;
    double var = 0.0;
    for (int site = 0; site < n; ++site)
      var += (site - mean) * (site - mean) * pops(site);
    m.center = mean;
    m.width = std::sqrt(var / total);
  }
  return m;
}

struct TimeSeries {
  int n = 0;
  Topology topology = Topology::OpenChain;
  double a_over_lambda = 0.0;
  std::vector<double> times;
  std::vector<double> p_sur;
  std::vector<double> activity;
  std::vector<double> com;    // packet center (site units)
  std::vector<double> width;  // packet RMS width (site units)
  std::vector<double> pop_times;            // coarser population grid
  std::vector<std::size_t> pop_indices;     // indices of pop_times in times
  std::vector<RealVector> populations;      // 3N per population sample

  std::size_t size() const { return times.size(); }
};

// Assemble a TimeSeries from sampled states; populations are kept every
// pop_stride-th sample. Validates the trajectory invariants (survival
// non-increasing, activity non-negative up to round-off).
inline TimeSeries make_series(const EvolutionResult& result, const Geometry& g,
                              int pop_stride = 1) {
  if (pop_stride < 1) throw std::invalid_argument("make_series: pop_stride >= 1");
  TimeSeries s;
  s.n = g.size();
  s.topology = g.topology;
  s.a_over_lambda = g.a_over_lambda;
  s.times = result.times;
  s.p_sur = result.survival;
  s.activity = result.activity;
  s.com.reserve(result.states.size());
  s.width.reserve(result.states.size());
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    const PacketMoments m = packet_moments(result.states[i], g);
    s.com.push_back(m.center);
    s.width.push_back(m.width);
    if (i % pop_stride == 0 || i + 1 == result.states.size()) {
      const ComplexVector& c = result.states[i];
      RealVector pops(c.size());
      for (int j = 0; j < c.size(); ++j) pops(j) = std::norm(c(j));
      s.pop_times.push_back(result.times[i]);
      s.pop_indices.push_back(i);
      s.populations.push_back(std::move(pops));
    }
  }
  for (std::size_t i = 0; i + 1 < s.p_sur.size(); ++i)
    if (s.p_sur[i + 1] > s.p_sur[i] + 1e-9)
      throw NumericalError("make_series: survival probability increased");
  for (double k : s.activity)
    if (k < -1e-9) throw NumericalError("make_series: negative activity");
  return s;
}

namespace detail {

// First derivative on a possibly non-uniform grid (three-point central
// formula; one-sided at the ends).
inline std::vector<double> grid_derivative(const std::vector<double>& t,
                                           const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (f[1] - f[0]) / (t[1] - t[0]);
  d[n - 1] = (f[n - 1] - f[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = t[i] - t[i - 1];
    const double hp = t[i + 1] - t[i];
    d[i] = (hm * hm * f[i + 1] - hp * hp * f[i - 1] +
            (hp * hp - hm * hm) * f[i]) /
           (hm * hp * (hm + hp));
  }
  return d;
}

}  // namespace detail

// max_t | dP_sur/dt + <K> | over interior sample points (central
// differences on the sample grid).
inline double balance_residual(const TimeSeries& s) {
  if (s.size() < 3) throw std::invalid_argument("balance_residual: need >= 3 samples");
  const std::vector<double> dp = detail::grid_derivative(s.times, s.p_sur);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    worst = std::max(worst, std::abs(dp[i] + s.activity[i]));
  return worst;
}

// Least-squares slope of -ln P_sur over [t_a, t_b].
inline double effective_decay_rate(const TimeSeries& s, double t_a, double t_b) {
  if (!(t_b > t_a))
    throw std::invalid_argument("effective_decay_rate: need t_b > t_a");
  if (s.times.empty() || t_a < s.times.front() - 1e-12 || t_b > s.times.back() + 1e-12)
    throw std::invalid_argument("effective_decay_rate: window outside the series");
  double st = 0.0, sy = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] < t_a || s.times[i] > t_b) continue;
    if (!(s.p_sur[i] > 0.0))
      throw std::invalid_argument("effective_decay_rate: P_sur must be positive on the window");
    st += s.times[i];
    sy += -std::log(s.p_sur[i]);
    ++count;
  }
  if (count < 2)
    throw std::invalid_argument("effective_decay_rate: window contains fewer than two samples");
  st /= count;
  sy /= count;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] < t_a || s.times[i] > t_b) continue;
    const double dt = s.times[i] - st;
    num += dt * (-std::log(s.p_sur[i]) - sy);
    den += dt * dt;
  }
  return num / den;
}

struct PlateauStats {
  bool present = false;
  double value = 0.0;    // median P_sur over the detected flat region
  double t_start = 0.0;
  double t_end = 0.0;
  double t_pl = 0.0;     // transport time scale (see plateau_stats)
  bool t_pl_from_crossing = false;
};

// Detect the flat region of P_sur (|d ln P / dt| below flat_threshold,
// longest contiguous run of at least 5 samples spanning >= 1 time unit)
// and the transport time t_pl: first crossing of the chain midpoint by the
// packet center of mass, else the fallback scale (N/2) / |V00_nn|.
inline PlateauStats plateau_stats(const TimeSeries& s, double flat_threshold = 1e-3) {
  if (s.size() < 5) throw std::invalid_argument("plateau_stats: series too short");
  PlateauStats out;

  std::vector<double> logp(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    logp[i] = s.p_sur[i] > 0.0 ? std::log(s.p_sur[i])
                               : -std::numeric_limits<double>::infinity();
  const std::vector<double> slope = detail::grid_derivative(s.times, logp);

  std::size_t best_begin = 0, best_end = 0;  // [begin, end)
  std::size_t run_begin = 0;
  bool in_run = false;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    const bool flat =
        i < s.size() && std::isfinite(slope[i]) && std::abs(slope[i]) < flat_threshold;
    if (flat && !in_run) {
      in_run = true;
      run_begin = i;
    } else if (!flat && in_run) {
      in_run = false;
      if (s.times[i - 1] - s.times[run_begin] >
          s.times[best_end > 0 ? best_end - 1 : 0] - s.times[best_begin])
        best_begin = run_begin, best_end = i;
    }
  }
  if (best_end > best_begin + 4 &&
      s.times[best_end - 1] - s.times[best_begin] >= 1.0) {
    out.present = true;
    out.t_start = s.times[best_begin];
    out.t_end = s.times[best_end - 1];
    std::vector<double> window(s.p_sur.begin() + best_begin, s.p_sur.begin() + best_end);
    std::sort(window.begin(), window.end());
    const std::size_t mid = window.size() / 2;
    out.value = window.size() % 2 ? window[mid]
                                  : 0.5 * (window[mid - 1] + window[mid]);
  }

  // Transport time scale.
  const double midpoint = 0.5 * (s.n - 1);
  out.t_pl = 0.0;
  if (s.topology == Topology::OpenChain) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.com[i] >= midpoint) {
        out.t_pl = s.times[i];
        out.t_pl_from_crossing = true;
        break;
      }
    }
  }
  if (!out.t_pl_from_crossing) {
    const double v_nn =
        std::abs(0.375 * v00_coefficient(2.0 * M_PI * s.a_over_lambda, M_PI / 2.0));
    out.t_pl = 0.5 * s.n / v_nn;
  }
  return out;
}

// Site populations (summed over internal levels), trapezoidally averaged
// over the population sample grid.
inline RealVector time_averaged_site_populations(const TimeSeries& s) {
  if (s.populations.empty())
    throw std::invalid_argument("time_averaged_site_populations: no population samples");
  RealVector acc = RealVector::Zero(s.n);
  auto site_sums = [&](const RealVector& pops) {
    RealVector out = RealVector::Zero(s.n);
    for (int site = 0; site < s.n; ++site)
      for (int level = 0; level < kLevels; ++level)
        out(site) += pops(flat_index(site, level));
    return out;
  };
  if (s.populations.size() == 1) return site_sums(s.populations.front());
  double span = 0.0;
  for (std::size_t i = 0; i + 1 < s.populations.size(); ++i) {
    const double h = s.pop_times[i + 1] - s.pop_times[i];
    acc += 0.5 * h * (site_sums(s.populations[i]) + site_sums(s.populations[i + 1]));
    span += h;
  }
  return acc / span;
}

// Inverse participation ratio of a (non-negative) population profile:
// 1/N for a uniform profile, 1 for a single occupied site.
inline double inverse_participation_ratio(const RealVector& site_populations) {
  const double total = site_populations.sum();
  if (!(total > 0.0))
    throw std::domain_error("inverse_participation_ratio: empty profile");
  return site_populations.squaredNorm() / (total * total);
}

// Index of the first local activity minimum (three-point minimum extended
// to a +-window), used as the post-transient marker.
inline std::optional<std::size_t> first_activity_minimum(const TimeSeries& s,
                                                         std::size_t window = 3) {
  if (s.size() < 2 * window + 1) return std::nullopt;
  for (std::size_t i = window; i + window < s.size(); ++i) {
    bool is_min = s.activity[i] < s.activity[0];
    for (std::size_t j = i - window; is_min && j <= i + window; ++j)
      if (j != i && s.activity[j] < s.activity[i]) is_min = false;
    if (is_min) return i;
  }
  return std::nullopt;
}

// Least-squares slope of values(t) over [t_a, t_b] (used for packet
// center-of-mass velocities).
inline double linear_slope(const std::vector<double>& times,
                           const std::vector<double>& values, double t_a, double t_b) {
  double st = 0.0, sv = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a || times[i] > t_b) continue;
    st += times[i];
    sv += values[i];
    ++count;
  }
  if (count < 2) throw std::invalid_argument("linear_slope: fewer than two samples in window");
  st /= count;
  sv /= count;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a || times[i] > t_b) continue;
    num += (times[i] - st) * (values[i] - sv);
    den += (times[i] - st) * (times[i] - st);
  }
  return num / den;
}

// Unwrap ring packet centers (mod N) into a continuous trajectory so a
// straight line can be fitted across revolutions.
inline std::vector<double> unwrap_ring_centers(const std::vector<double>& centers, int n) {
  std::vector<double> out = centers;
  for (std::size_t i = 1; i < out.size(); ++i) {
    double d = out[i] - out[i - 1];
    while (d > 0.5 * n) {
      out[i] -= n;
      d = out[i] - out[i - 1];
    }
    while (d < -0.5 * n) {
      out[i] += n;
      d = out[i] - out[i - 1];
    }
  }
  return out;
}

}  // namespace subrad
