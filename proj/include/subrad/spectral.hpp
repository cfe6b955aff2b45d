#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "subrad/couplings.hpp"
#include "subrad/geometry.hpp"

// Semi-analytic spectra of the clean ring. With the quantization axis
// perpendicular to the ring plane the m=0 sector of V and Gamma is a
// symmetric circulant, so the plane waves
//
//   |k> = N^{-1/2} sum_alpha exp[i (2 pi / N) alpha k] |e^0_alpha>,
//   k = -floor(N/2), ..., floor((N-1)/2),   p(k) = 2 pi k / (N a),
//
// diagonalize both matrices simultaneously. V_k and Gamma_k are the DFT of
// the first row of the respective sector.

namespace subrad {

struct ModeSpectrum {
  int n = 0;
  double a_over_lambda = 0.0;
  std::vector<int> k;         // winding numbers, ascending
  std::vector<double> p_a;    // p(k) * a = 2 pi k / N
  std::vector<double> energy; // V_k in gamma
  std::vector<double> decay;  // Gamma_k in gamma

  int index_of(int winding) const {
    const int idx = winding + n / 2;
    if (idx < 0 || idx >= n)
      throw std::invalid_argument("ModeSpectrum: winding out of range");
    return idx;
  }
  bool subradiant(int idx) const { return decay[idx] < 1.0; }
};

namespace detail {

// Reject disordered or rebuilt geometries: every chord must match the
// clean ring value.
inline void check_clean_ring(const Geometry& g) {
  if (g.topology != Topology::Ring)
    throw std::invalid_argument("ring_spectrum_m0: geometry is not a ring");
  if (std::abs(std::abs(g.axis.z()) - 1.0) > 1e-12)
    throw std::invalid_argument(
        "ring_spectrum_m0: quantization axis must be perpendicular to the ring plane");
  const int n = g.size();
  const double radius = g.a_over_lambda / (2.0 * std::sin(M_PI / n));
  for (int d = 1; d < n; ++d) {
    const double chord = 2.0 * radius * std::sin(M_PI * d / n);
    const double actual = (g.positions[d] - g.positions[0]).norm();
    if (std::abs(actual - chord) > 1e-9 * g.a_over_lambda)
      throw std::invalid_argument("ring_spectrum_m0: ring is not clean");
  }
}

}  // namespace detail

inline ModeSpectrum ring_spectrum_m0(const Geometry& g) {
  detail::check_clean_ring(g);
  const int n = g.size();

  // First row of the m=0 sector: index 0 is the self term.
  std::vector<double> row_v(n, 0.0), row_g(n, 0.0);
  row_g[0] = 1.0;
  for (int d = 1; d < n; ++d) {
    const PairFrame f = pair_frame(g, 0, d);
    row_v[d] = coherent_block(f)(kLevelZero, kLevelZero).real();
    row_g[d] = dissipative_block(f)(kLevelZero, kLevelZero).real();
  }

  ModeSpectrum s;
  s.n = n;
  s.a_over_lambda = g.a_over_lambda;
  s.k.reserve(n);
  for (int winding = -(n / 2); winding <= (n - 1) / 2; ++winding) {
    double vk = 0.0, gk = 0.0;
    for (int d = 0; d < n; ++d) {
      const double c = std::cos(2.0 * M_PI * d * winding / n);
      vk += row_v[d] * c;
      gk += row_g[d] * c;
    }
    s.k.push_back(winding);
    s.p_a.push_back(2.0 * M_PI * winding / n);
    s.energy.push_back(vk);
    s.decay.push_back(gk);
  }
  return s;
}

// Fraction of modes with decay rate strictly below the single-atom rate.
inline double subradiant_fraction(const ModeSpectrum& s) {
  int count = 0;
  for (double g : s.decay)
    if (g < 1.0) ++count;
  return static_cast<double>(count) / s.n;
}

// Gradient of V_k with respect to p(k), central difference, in lattice
// sites per unit 1/gamma time.
inline double group_velocity(const ModeSpectrum& s, int k_center) {
  const int idx = s.index_of(k_center);
  if (idx == 0 || idx == s.n - 1)
    throw std::invalid_argument("group_velocity: k_center at the zone edge");
  return (s.energy[idx + 1] - s.energy[idx - 1]) / (s.p_a[idx + 1] - s.p_a[idx - 1]);
}

// Angle theta_f with V00(kappa_nn, theta_f) = 0, found by bracketed
// bisection on (0, pi/2]. Near field this tends to acos(1/sqrt(3)).
inline double magic_angle(double kappa_nn) {
  if (!(kappa_nn > 0.0))
    throw std::invalid_argument("magic_angle: kappa must be positive");
  double lo = 1e-9;
  double hi = M_PI / 2.0;
  double flo = v00_coefficient(kappa_nn, lo);
  double fhi = v00_coefficient(kappa_nn, hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("magic_angle: no sign change of V00 in (0, pi/2]");
  // Bisect essentially to machine precision (comfortably below the 1e-12
  // contract), so the residual in V00 is round-off limited.
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = v00_coefficient(kappa_nn, mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

// Angle theta_r < theta_f where the nearest-neighbor coherent coupling has
// the same magnitude and opposite sign as at theta = pi/2. Best effort: if
// the target is out of reach the minimizing angle is returned with the
// achieved value.
struct SignFlipAngle {
  double theta = 0.0;
  double achieved = 0.0;  // V00 at theta
  double target = 0.0;    // -V00 at pi/2
  bool exact = false;
};

inline SignFlipAngle sign_flip_angle(double kappa_nn) {
  if (!(kappa_nn > 0.0))
    throw std::invalid_argument("sign_flip_angle: kappa must be positive");
  SignFlipAngle result;
  result.target = -v00_coefficient(kappa_nn, M_PI / 2.0);

  double lo = 1e-9;
  double hi = M_PI / 2.0;
  try {
    hi = magic_angle(kappa_nn);
  } catch (const std::domain_error&) {
    // keep pi/2; the minimizer below still applies
  }
  auto excess = [&](double theta) {
    return v00_coefficient(kappa_nn, theta) - result.target;
  };
  double flo = excess(lo);
  double fhi = excess(hi);
  if ((flo > 0.0) != (fhi > 0.0)) {
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = excess(mid);
      if (fmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fmid > 0.0) == (fhi > 0.0)) {
        hi = mid;
        fhi = fmid;
      } else {
        lo = mid;
        flo = fmid;
      }
    }
    result.theta = 0.5 * (lo + hi);
    result.achieved = v00_coefficient(kappa_nn, result.theta);
    result.exact = true;
    return result;
  }
  // No crossing: scan for the minimizer of |V00 - target|.
  double best_theta = lo;
  double best = std::abs(flo);
  constexpr int kGrid = 20001;
  for (int i = 0; i < kGrid; ++i) {
    const double theta = lo + (hi - lo) * i / (kGrid - 1);
    const double e = std::abs(excess(theta));
    if (e < best) {
      best = e;
      best_theta = theta;
    }
  }
  result.theta = best_theta;
  result.achieved = v00_coefficient(kappa_nn, best_theta);
  result.exact = false;
  return result;
}

}  // namespace subrad
