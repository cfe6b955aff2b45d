#pragma once

#include <cmath>

#include "subrad/common.hpp"
#include "subrad/geometry.hpp"

// Pairwise coherent (V) and dissipative (Gamma) coupling blocks of the
// dipole-dipole exchange induced by the free radiation field, the Zeeman
// block, and assembly of the dense 3N x 3N operators
//
//   Heff = V - i/2 Gamma + Delta        (hbar = gamma = 1).
//
// Each 3x3 block acts on the internal basis (+1, 0, -1).

namespace subrad {

namespace detail {

inline constexpr double kSeriesKappa = 1e-4;

// sin(k)/k, stable at small k.
inline double sinc_kernel(double k) {
  if (k < kSeriesKappa) {
    const double k2 = k * k;
    return 1.0 - k2 / 6.0 + k2 * k2 / 120.0;
  }
  return std::sin(k) / k;
}

// cos(k)/k^2 - sin(k)/k^3 -> -1/3 as k -> 0; the two terms cancel
// catastrophically when evaluated directly at small k.
inline double radial_diff_kernel(double k) {
  if (k < kSeriesKappa) {
    const double k2 = k * k;
    return -1.0 / 3.0 + k2 / 30.0 - k2 * k2 / 840.0;
  }
  return std::cos(k) / (k * k) - std::sin(k) / (k * k * k);
}

// sin(k)/k^2 + cos(k)/k^3 (no cancellation; only used for k > 0).
inline double radial_sum_kernel(double k) {
  return std::sin(k) / (k * k) + std::cos(k) / (k * k * k);
}

}  // namespace detail

// Raw angular coefficients, without the 3/8 (coherent) and 3/4
// (dissipative) prefactors. Exposed for the root finders and tests.
inline double v00_coefficient(double kappa, double theta) {
  const double c2 = std::cos(theta) * std::cos(theta);
  const double a = detail::radial_sum_kernel(kappa);
  const double b = std::cos(kappa) / kappa;
  return 2.0 * ((1.0 - 3.0 * c2) * a - (1.0 - c2) * b);
}

inline double g00_coefficient(double kappa, double theta) {
  const double c2 = std::cos(theta) * std::cos(theta);
  return 2.0 * ((1.0 - c2) * detail::sinc_kernel(kappa) +
                (1.0 - 3.0 * c2) * detail::radial_diff_kernel(kappa));
}

// Coherent exchange block (3 gamma / 8 prefactor included). The self term
// is excluded by construction: kappa must be positive.
inline Eigen::Matrix3cd coherent_block(const PairFrame& f) {
  if (!(f.kappa > 0.0))
    throw std::invalid_argument("coherent_block: kappa must be positive");
  const double s2 = f.sin_theta * f.sin_theta;
  const double sin_2theta = 2.0 * f.sin_theta * f.cos_theta;
  const double a = detail::radial_sum_kernel(f.kappa);
  const double b = std::cos(f.kappa) / f.kappa;

  const double v11 = (2.0 - 3.0 * s2) * a - (2.0 - s2) * b;
  const double v00 = 2.0 * ((1.0 - 3.0 * f.cos_theta * f.cos_theta) * a - s2 * b);
  const Complex v10 = (sin_2theta / std::sqrt(2.0)) * f.phase_phi * (b - 3.0 * a);
  const Complex vpm = s2 * f.phase_phi * f.phase_phi * (3.0 * a - b);

  Eigen::Matrix3cd block;
  block << v11, -std::conj(v10), std::conj(vpm),
          -v10,             v00, std::conj(v10),
           vpm,             v10,            v11;
  return 0.375 * block;  // 3 gamma / 8
}

// Dissipative block (3 gamma / 4 prefactor included); finite for all
// kappa >= 0 thanks to the series branch of the radial kernels.
inline Eigen::Matrix3cd dissipative_block(const PairFrame& f) {
  const double s2 = f.sin_theta * f.sin_theta;
  const double sin_2theta = 2.0 * f.sin_theta * f.cos_theta;
  const double s = detail::sinc_kernel(f.kappa);
  const double d = detail::radial_diff_kernel(f.kappa);

  const double g11 = (2.0 - s2) * s + (2.0 - 3.0 * s2) * d;
  const double g00 = 2.0 * (s2 * s + (1.0 - 3.0 * f.cos_theta * f.cos_theta) * d);
  const Complex g10 = (sin_2theta / std::sqrt(2.0)) * f.phase_phi * (-s - 3.0 * d);
  const Complex gpm = s2 * f.phase_phi * f.phase_phi * (s + 3.0 * d);

  Eigen::Matrix3cd block;
  block << g11, -std::conj(g10), std::conj(gpm),
          -g10,             g00, std::conj(g10),
           gpm,             g10,            g11;
  return 0.75 * block;  // 3 gamma / 4
}

// Exact kappa -> 0 limit of the dissipative block: gamma * identity,
// independent of the angles.
inline Eigen::Matrix3cd dissipative_self_block() {
  return Eigen::Matrix3cd::Identity();
}

// Uniform magnetic field, components scaled so that the Zeeman matrix
// entries are directly in units of gamma (mu_B g absorbed).
struct ZeemanField {
  Vec3 b = Vec3::Zero();

  // Field along the quantization axis with splitting delta.
  static ZeemanField along_axis(double delta) { return ZeemanField{Vec3(0.0, 0.0, delta)}; }

  double splitting() const { return b.norm(); }
};

inline Eigen::Matrix3cd zeeman_block(const ZeemanField& field) {
  const double bx = field.b.x();
  const double by = field.b.y();
  const double bz = field.b.z();
  const Complex lower = Complex(bx, by) / std::sqrt(2.0);
  Eigen::Matrix3cd block;
  block <<               bz, std::conj(lower),              0.0,
                      lower,              0.0, std::conj(lower),
                        0.0,            lower,              -bz;
  return block;
}

enum class OperatorKind { CoherentV, DissipativeGamma, Zeeman, Effective };

struct Operators {
  int n = 0;
  ComplexMatrix v;      // coherent exchange, zero diagonal blocks
  ComplexMatrix gamma;  // dissipative couplings, diagonal blocks = identity
  ComplexMatrix delta;  // Zeeman, block diagonal
  ComplexMatrix heff;   // v - i/2 gamma + delta

  const ComplexMatrix& matrix(OperatorKind kind) const {
    switch (kind) {
      case OperatorKind::CoherentV: return v;
      case OperatorKind::DissipativeGamma: return gamma;
      case OperatorKind::Zeeman: return delta;
      case OperatorKind::Effective: return heff;
    }
    throw std::invalid_argument("Operators::matrix: bad kind");
  }
};

// Dense 3N x 3N operators for a geometry in a uniform field. The (beta,
// alpha) block is stored as the adjoint of the (alpha, beta) block, so the
// assembled V, Gamma, Delta are Hermitian by construction.
inline Operators assemble(const Geometry& g, const ZeemanField& field = {}) {
  const int n = g.size();
  const int dim = kLevels * n;
  Operators ops;
  ops.n = n;
  ops.v = ComplexMatrix::Zero(dim, dim);
  ops.gamma = ComplexMatrix::Zero(dim, dim);
  ops.delta = ComplexMatrix::Zero(dim, dim);

  const Eigen::Matrix3cd zeeman = zeeman_block(field);
  for (int alpha = 0; alpha < n; ++alpha) {
    ops.gamma.block<3, 3>(3 * alpha, 3 * alpha) = dissipative_self_block();
    ops.delta.block<3, 3>(3 * alpha, 3 * alpha) = zeeman;
  }
  for (int alpha = 0; alpha < n; ++alpha) {
    for (int beta = alpha + 1; beta < n; ++beta) {
      const PairFrame frame = pair_frame(g, alpha, beta);
      if (!(frame.kappa > 0.0))
        throw NumericalError("assemble: coincident atom positions (singular geometry)");
      const Eigen::Matrix3cd vb = coherent_block(frame);
      const Eigen::Matrix3cd gb = dissipative_block(frame);
      ops.v.block<3, 3>(3 * alpha, 3 * beta) = vb;
      ops.v.block<3, 3>(3 * beta, 3 * alpha) = vb.adjoint();
      ops.gamma.block<3, 3>(3 * alpha, 3 * beta) = gb;
      ops.gamma.block<3, 3>(3 * beta, 3 * alpha) = gb.adjoint();
    }
  }
  ops.heff = ops.v - Complex(0.0, 0.5) * ops.gamma + ops.delta;
  return ops;
}

// N x N restriction of a 3N x 3N operator to one internal level.
inline ComplexMatrix level_sector_matrix(const ComplexMatrix& m, int level) {
  const int n = static_cast<int>(m.rows()) / kLevels;
  ComplexMatrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a, b) = m(flat_index(a, level), flat_index(b, level));
  return out;
}

// Control variant with all interatomic couplings removed: independent
// atoms with their local decay and Zeeman shifts.
inline Operators assemble_noninteracting(const Geometry& g, const ZeemanField& field = {}) {
  const int n = g.size();
  const int dim = kLevels * n;
  Operators ops;
  ops.n = n;
  ops.v = ComplexMatrix::Zero(dim, dim);
  ops.gamma = ComplexMatrix::Zero(dim, dim);
  ops.delta = ComplexMatrix::Zero(dim, dim);
  const Eigen::Matrix3cd zeeman = zeeman_block(field);
  for (int alpha = 0; alpha < n; ++alpha) {
    ops.gamma.block<3, 3>(3 * alpha, 3 * alpha) = dissipative_self_block();
    ops.delta.block<3, 3>(3 * alpha, 3 * alpha) = zeeman;
  }
  ops.heff = ops.v - Complex(0.0, 0.5) * ops.gamma + ops.delta;
  return ops;
}

}  // namespace subrad
