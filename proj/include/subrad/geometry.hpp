#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subrad/common.hpp"
#include "subrad/rng.hpp"

// Lattice geometries (ring, open chain), quenched positional disorder, and
// the per-pair separation frame (kappa, theta, phi) relative to the
// quantization axis.

namespace subrad {

enum class Topology { Ring, OpenChain };

struct Geometry {
  Topology topology = Topology::OpenChain;
  double a_over_lambda = 0.0;                 // nearest-neighbor spacing / lambda
  std::vector<Vec3> positions;                // in units of lambda
  Vec3 axis = Vec3(0.0, 0.0, 1.0);            // quantization axis (unit norm)

  int size() const { return static_cast<int>(positions.size()); }
};

// N atoms equally spaced on a circle in the xy-plane, nearest-neighbor
// chord distance a, quantization axis +z (so theta = pi/2 for every pair).
inline Geometry build_ring(int n, double a_over_lambda) {
  if (n < 2) throw std::invalid_argument("build_ring: need n >= 2");
  if (!(a_over_lambda > 0.0))
    throw std::invalid_argument("build_ring: a/lambda must be positive");
  Geometry g;
  g.topology = Topology::Ring;
  g.a_over_lambda = a_over_lambda;
  const double radius = a_over_lambda / (2.0 * std::sin(M_PI / n));
  g.positions.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * M_PI * i / n;
    g.positions.emplace_back(radius * std::cos(angle), radius * std::sin(angle), 0.0);
  }
  return g;
}

// N collinear atoms along +y, spacing a, quantization axis +z.
inline Geometry build_chain(int n, double a_over_lambda) {
  if (n < 1) throw std::invalid_argument("build_chain: need n >= 1");
  if (!(a_over_lambda > 0.0))
    throw std::invalid_argument("build_chain: a/lambda must be positive");
  Geometry g;
  g.topology = Topology::OpenChain;
  g.a_over_lambda = a_over_lambda;
  g.positions.reserve(n);
  for (int i = 0; i < n; ++i) g.positions.emplace_back(0.0, i * a_over_lambda, 0.0);
  return g;
}

// Separation frame of r_alpha - r_beta relative to the quantization axis.
//
// kappa = 2 pi r / lambda, theta = polar angle from the axis, phi =
// azimuth about the axis measured from (the projection of) the x-axis.
// The trigonometric values are carried alongside the angles: they are
// computed from the vector components directly, so exact orthogonality
// (e.g. a chain perpendicular to the axis) yields exact zeros in the
// coupling blocks instead of sin(pi) round-off.
struct PairFrame {
  double kappa = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double cos_theta = 0.0;
  double sin_theta = 1.0;
  Complex phase_phi{1.0, 0.0};  // e^{i phi}

  static PairFrame from_angles(double kappa, double theta, double phi) {
    PairFrame f;
    f.kappa = kappa;
    f.theta = theta;
    f.phi = phi;
    f.cos_theta = std::cos(theta);
    f.sin_theta = std::sin(theta);
    f.phase_phi = std::polar(1.0, phi);
    return f;
  }
};

namespace detail {

// Orthonormal in-plane frame (e1, e2) for the azimuth, with e1 the
// projection of the x-axis (falls back to y if the axis is along x).
inline void azimuth_frame(const Vec3& axis, Vec3& e1, Vec3& e2) {
  e1 = Vec3::UnitX() - axis.dot(Vec3::UnitX()) * axis;
  if (e1.squaredNorm() < 1e-12) {
    e1 = Vec3::UnitY() - axis.dot(Vec3::UnitY()) * axis;
  }
  e1.normalize();
  e2 = axis.cross(e1);
}

}  // namespace detail

inline PairFrame pair_frame(const Geometry& g, int alpha, int beta) {
  if (alpha == beta)
    throw std::invalid_argument("pair_frame: self-frame is undefined");
  if (alpha < 0 || beta < 0 || alpha >= g.size() || beta >= g.size())
    throw std::invalid_argument("pair_frame: site index out of range");
  const Vec3 r = g.positions[alpha] - g.positions[beta];
  const double dist = r.norm();
  PairFrame f;
  f.kappa = 2.0 * M_PI * dist;
  if (dist == 0.0) return f;  // coincident atoms; caller decides how to fail

  const Vec3 rhat = r / dist;
  double c = rhat.dot(g.axis);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  f.cos_theta = c;
  f.sin_theta = std::sqrt(1.0 - c * c);
  f.theta = std::acos(c);

  Vec3 e1, e2;
  detail::azimuth_frame(g.axis, e1, e2);
  const double x = r.dot(e1);
  const double y = r.dot(e2);
  const double in_plane = std::sqrt(x * x + y * y);
  if (in_plane > 0.0) {
    f.phase_phi = Complex(x / in_plane, y / in_plane);
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += 2.0 * M_PI;
    f.phi = phi;
  } else {
    f.phase_phi = Complex(1.0, 0.0);  // separation along the axis: phi is arbitrary
    f.phi = 0.0;
  }
  return f;
}

// Quenched disorder: every position displaced by an independent isotropic
// 3D Gaussian with standard deviation sigma = sigma_over_a * a per
// Cartesian component. Deterministic for a fixed seed.
inline Geometry sample_disordered(const Geometry& g, double sigma_over_a,
                                  std::uint64_t seed) {
  if (sigma_over_a < 0.0)
    throw std::invalid_argument("sample_disordered: sigma/a must be >= 0");
  Geometry out = g;
  if (sigma_over_a == 0.0) return out;
  const double sigma = sigma_over_a * g.a_over_lambda;
  rng::Normal normal(seed);
  for (auto& p : out.positions) {
    p.x() += sigma * normal();
    p.y() += sigma * normal();
    p.z() += sigma * normal();
  }
  return out;
}

inline nlohmann::json to_json(const Geometry& g) {
  nlohmann::json j;
  j["topology"] = g.topology == Topology::Ring ? "ring" : "chain";
  j["n"] = g.size();
  j["a_over_lambda"] = g.a_over_lambda;
  auto positions = nlohmann::json::array();
  for (const auto& p : g.positions)
    positions.push_back({p.x(), p.y(), p.z()});
  j["positions"] = std::move(positions);
  j["axis"] = {g.axis.x(), g.axis.y(), g.axis.z()};
  return j;
}

inline Geometry geometry_from_json(const nlohmann::json& j) {
  Geometry g;
  const std::string topology = j.at("topology").get<std::string>();
  if (topology == "ring")
    g.topology = Topology::Ring;
  else if (topology == "chain")
    g.topology = Topology::OpenChain;
  else
    throw std::invalid_argument("geometry_from_json: unknown topology " + topology);
  g.a_over_lambda = j.at("a_over_lambda").get<double>();
  const int n = j.at("n").get<int>();
  for (const auto& p : j.at("positions"))
    g.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                             p.at(2).get<double>());
  if (g.size() != n)
    throw std::invalid_argument("geometry_from_json: n does not match positions");
  const auto& axis = j.at("axis");
  g.axis = Vec3(axis.at(0).get<double>(), axis.at(1).get<double>(),
                axis.at(2).get<double>());
  const double norm = g.axis.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("geometry_from_json: axis must be a unit vector");
  g.axis /= norm;
  return g;
}

}  // namespace subrad
