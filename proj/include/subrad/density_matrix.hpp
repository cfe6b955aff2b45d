#pragma once

#include <span>
#include <vector>

#include "subrad/couplings.hpp"
#include "subrad/dynamics.hpp"

// Truncated density matrix over {|G>, |e^m_alpha>} and its component-wise
// equations of motion, integrated directly. This is the validation oracle
// for the effective-Hamiltonian evolution: for a pure initial state the
// excited block must track |psi(t)><psi(t)|, and the total trace
// rho_GG + Tr rho_ee is conserved.
//
// Block equations (hbar = 1, Z = V - i/2 Gamma so Heff = Z + Delta):
//   d/dt rho_ee = -i (Heff rho_ee - rho_ee Heff^dag)
//   d/dt rho_eG = -i Heff rho_eG
//   d/dt rho_Ge = +i rho_Ge Heff^dag
//   d/dt rho_GG = Tr(Gamma rho_ee)
// The refilling term pairs the jump operators in the canonical
// completely-positive order, which conserves rho_GG + Tr rho_ee for
// complex-valued Gamma as well.

namespace subrad {

struct TruncatedDensityMatrix {
  double rho_gg = 0.0;
  Eigen::RowVectorXcd rho_ge;  // <G| rho |e>, 3N entries
  ComplexVector rho_eg;        // <e| rho |G>, 3N entries
  ComplexMatrix rho_ee;        // 3N x 3N

  static TruncatedDensityMatrix pure(const ExcitationState& state) {
    TruncatedDensityMatrix rho;
    rho.rho_gg = 0.0;
    rho.rho_ge = Eigen::RowVectorXcd::Zero(state.amps.size());
    rho.rho_eg = ComplexVector::Zero(state.amps.size());
    rho.rho_ee = state.amps * state.amps.adjoint();
    return rho;
  }

  double trace() const { return rho_gg + rho_ee.trace().real(); }
};

struct DensityEvolutionResult {
  std::vector<double> times;
  std::vector<TruncatedDensityMatrix> samples;
};

namespace detail {

struct DensityDerivative {
  static void eval(const TruncatedDensityMatrix& rho, const Operators& ops,
                   TruncatedDensityMatrix& out) {
    const Complex minus_i(0.0, -1.0);
    out.rho_ee = minus_i * (ops.heff * rho.rho_ee - rho.rho_ee * ops.heff.adjoint());
    out.rho_eg = minus_i * (ops.heff * rho.rho_eg);
    out.rho_ge = -minus_i * (rho.rho_ge * ops.heff.adjoint());
    out.rho_gg = (ops.gamma * rho.rho_ee).trace().real();
  }
};

inline void density_axpy(TruncatedDensityMatrix& y, double a,
                         const TruncatedDensityMatrix& x) {
  y.rho_gg += a * x.rho_gg;
  y.rho_ge += a * x.rho_ge;
  y.rho_eg += a * x.rho_eg;
  y.rho_ee += a * x.rho_ee;
}

}  // namespace detail

// RK4 on all four blocks simultaneously; the step obeys the same
// h * |Heff|_inf <= 0.05 rule as the state integrator.
inline DensityEvolutionResult evolve_density_oracle(
    const TruncatedDensityMatrix& initial, const Operators& ops, double t_final,
    std::span<const double> sample_times, double start_time = 0.0) {
  detail::check_sample_times(sample_times, start_time, t_final);

  DensityEvolutionResult result;
  result.times.assign(sample_times.begin(), sample_times.end());
  result.samples.reserve(sample_times.size());

  // A quarter of the state-integrator step: the pure-state equivalence
  // contract on rho_ee is tighter than the step rule alone provides.
  const double step = 0.25 * default_rk4_step(ops.heff);
  TruncatedDensityMatrix rho = initial;
  TruncatedDensityMatrix k1 = rho, k2 = rho, k3 = rho, k4 = rho, stage = rho;
  double t = start_time;

  auto advance = [&](double span) {
    if (span <= 0.0) return;
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / step)));
    const double h = span / steps;
    for (long i = 0; i < steps; ++i) {
      detail::DensityDerivative::eval(rho, ops, k1);
      stage = rho;
      detail::density_axpy(stage, 0.5 * h, k1);
      detail::DensityDerivative::eval(stage, ops, k2);
      stage = rho;
      detail::density_axpy(stage, 0.5 * h, k2);
      detail::DensityDerivative::eval(stage, ops, k3);
      stage = rho;
      detail::density_axpy(stage, h, k3);
      detail::DensityDerivative::eval(stage, ops, k4);
      detail::density_axpy(rho, h / 6.0, k1);
      detail::density_axpy(rho, h / 3.0, k2);
      detail::density_axpy(rho, h / 3.0, k3);
      detail::density_axpy(rho, h / 6.0, k4);
    }
  };

  for (double ts : sample_times) {
    advance(ts - t);
    t = ts;
    if (!rho.rho_ee.allFinite())
      throw NumericalError("evolve_density_oracle: non-finite density matrix");
    result.samples.push_back(rho);
  }
  return result;
}

}  // namespace subrad
