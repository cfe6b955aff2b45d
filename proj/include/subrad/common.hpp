#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

// Common aliases and conventions.
//
// Units: hbar = 1 and the single-atom decay rate gamma = 1 throughout.
// Energies and rates are in gamma, times in 1/gamma, lengths in units of
// the transition wavelength lambda.

namespace subrad {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Internal level basis, ordered (+1, 0, -1) to match the block layout of
// the pairwise coupling matrices.
inline constexpr int kLevels = 3;
inline constexpr int kLevelPlus = 0;
inline constexpr int kLevelZero = 1;
inline constexpr int kLevelMinus = 2;

// Flattened index of (site, level) in a 3N amplitude vector or operator.
inline int flat_index(int site, int level) { return kLevels * site + level; }

// Raised when assembled matrices or integrated trajectories go out of
// their numerical contract (non-finite amplitudes, broken invariants).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subrad
