#pragma once

#include <string>
#include <vector>

#include "subrad/density_matrix.hpp"
#include "subrad/dynamics.hpp"
#include "subrad/rng.hpp"
#include "subrad/spectral.hpp"

// Built-in validation suite surfaced by the `validate` CLI subcommand:
// operator identities on randomized geometries, the Appendix-style
// density-matrix oracle against the effective-Hamiltonian evolution at
// small N, the circulant ring spectrum against dense diagonalization, and
// single-atom decay. `corrupt_gamma` is a negative-control hook that
// flips the sign of the dissipative inter-atom blocks.

namespace subrad {

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst-case figure of merit
  double threshold = 0.0;
  std::string detail;
};

namespace detail {

inline Geometry random_geometry(int n, rng::Normal& normal) {
  Geometry g;
  g.topology = Topology::OpenChain;
  g.a_over_lambda = 0.2;
  for (int i = 0; i < n; ++i) {
    // Uniform-ish positions in a half-wavelength box via the generator's
    // uniform output; resample until no pair is closer than 0.02 lambda.
    Vec3 p;
    bool ok = false;
    while (!ok) {
      p = Vec3(0.5 * normal.uniform(), 0.5 * normal.uniform(), 0.5 * normal.uniform());
      ok = true;
      for (const auto& q : g.positions)
        if ((p - q).norm() < 0.02) ok = false;
    }
    g.positions.push_back(p);
  }
  Vec3 axis(normal(), normal(), normal());
  while (axis.norm() < 1e-3) axis = Vec3(normal(), normal(), normal());
  g.axis = axis.normalized();
  return g;
}

inline void corrupt_gamma_sign(Operators& ops) {
  for (int a = 0; a < ops.n; ++a)
    for (int b = 0; b < ops.n; ++b)
      if (a != b) ops.gamma.block<3, 3>(3 * a, 3 * b) *= -1.0;
  ops.heff = ops.v - Complex(0.0, 0.5) * ops.gamma + ops.delta;
}

}  // namespace detail

inline std::vector<ValidationCheck> run_validation(bool corrupt_gamma = false) {
  std::vector<ValidationCheck> checks;
  rng::Normal normal(0x5eed1234u);

  // Operator identities on 50 randomized geometries, N <= 8.
  {
    ValidationCheck hermiticity{"hermiticity", false, 0.0, 1e-12, "max |M - M^dag| / max |M|"};
    ValidationCheck psd{"gamma_psd", false, 0.0, 1e-10, "min eig(Gamma) / max eig(Gamma)"};
    ValidationCheck diagonals{"diagonal_blocks", false, 0.0, 0.0,
                              "Gamma_aa = I and V_aa = 0 exactly"};
    double worst_herm = 0.0, worst_psd = 0.0, worst_diag = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + static_cast<int>(normal.uniform() * 8.0);
      const Geometry g = detail::random_geometry(std::min(n, 8), normal);
      ZeemanField field;
      field.b = Vec3(normal(), normal(), normal());
      Operators ops = assemble(g, field);
      if (corrupt_gamma) detail::corrupt_gamma_sign(ops);
      for (const ComplexMatrix* m : {&ops.v, &ops.gamma, &ops.delta}) {
        const double scale = std::max(1e-300, m->cwiseAbs().maxCoeff());
        worst_herm = std::max(
            worst_herm, ((*m) - m->adjoint()).cwiseAbs().maxCoeff() / scale);
      }
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(ops.gamma);
      const double max_eig = eig.eigenvalues().maxCoeff();
      worst_psd = std::max(worst_psd, -eig.eigenvalues().minCoeff() / max_eig);
      for (int a = 0; a < ops.n; ++a) {
        worst_diag = std::max(
            worst_diag, (ops.gamma.block<3, 3>(3 * a, 3 * a) -
                         Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
        worst_diag = std::max(
            worst_diag, ops.v.block<3, 3>(3 * a, 3 * a).cwiseAbs().maxCoeff());
      }
    }
    hermiticity.measured = worst_herm;
    hermiticity.pass = worst_herm <= hermiticity.threshold;
    psd.measured = worst_psd;
    psd.pass = worst_psd <= psd.threshold;
    diagonals.measured = worst_diag;
    diagonals.pass = worst_diag == 0.0;
    checks.push_back(hermiticity);
    checks.push_back(psd);
    checks.push_back(diagonals);
  }

  // Single-atom decay, both engines.
  {
    ValidationCheck check{"single_atom_decay", false, 0.0, 1e-6,
                          "max rel. |P_sur - exp(-t)| over t in [0,10]"};
    const Geometry g = build_chain(1, 0.1);
    const Operators ops = assemble(g);
    std::vector<double> times;
    for (int i = 0; i <= 100; ++i) times.push_back(0.1 * i);
    double worst = 0.0;
    for (Engine engine : {Engine::Spectral, Engine::Integrator}) {
      const EvolutionResult r =
          evolve_const(init_localized(g, 0, kLevelZero), ops, 10.0, times, engine);
      for (std::size_t i = 0; i < times.size(); ++i)
        worst = std::max(worst, std::abs(r.survival[i] - std::exp(-times[i])) /
                                    std::exp(-times[i]));
    }
    check.measured = worst;
    check.pass = worst <= check.threshold;
    checks.push_back(check);
  }

  // Truncated density-matrix oracle vs effective-Hamiltonian evolution.
  {
    ValidationCheck frob{"density_oracle_pure_state", false, 0.0, 1e-8,
                         "max Frobenius |rho_ee - |psi><psi||"};
    ValidationCheck trace{"density_oracle_trace", false, 0.0, 1e-8,
                          "max |rho_GG + Tr rho_ee - 1|"};
    double worst_frob = 0.0, worst_trace = 0.0;
    std::vector<double> times{0.5, 1.0, 2.0, 3.0};
    for (int n : {1, 2, 3, 5}) {
      const Geometry g = n >= 2 ? build_ring(n, 0.12) : build_chain(1, 0.12);
      ZeemanField field;
      field.b = Vec3(0.2, -0.1, 0.4);
      const Operators ops = assemble(g, field);
      ExcitationState psi0 = init_localized(g, 0, kLevelZero);
      if (n >= 2) {
        psi0.amps(flat_index(1, kLevelPlus)) = Complex(0.3, 0.2);
        psi0.amps /= psi0.amps.norm();
      }
      const EvolutionResult traj = evolve_const(psi0, ops, times.back(), times);
      const DensityEvolutionResult rho =
          evolve_density_oracle(TruncatedDensityMatrix::pure(psi0), ops,
                                times.back(), times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const ComplexMatrix proj = traj.states[i] * traj.states[i].adjoint();
        worst_frob =
            std::max(worst_frob, (rho.samples[i].rho_ee - proj).norm());
        worst_trace =
            std::max(worst_trace, std::abs(rho.samples[i].trace() - 1.0));
      }
    }
    frob.measured = worst_frob;
    frob.pass = worst_frob <= frob.threshold;
    trace.measured = worst_trace;
    trace.pass = worst_trace <= trace.threshold;
    checks.push_back(frob);
    checks.push_back(trace);
  }

  // Circulant ring spectrum vs dense diagonalization of the m=0 sector.
  {
    ValidationCheck check{"ring_spectrum_vs_dense", false, 0.0, 1e-10,
                          "max eigenvalue / residual / trace deviation, N <= 12"};
    double worst = 0.0;
    for (int n = 2; n <= 12; ++n) {
      const Geometry g = build_ring(n, 0.08);
      const Operators ops = assemble(g);
      const ModeSpectrum s = ring_spectrum_m0(g);
      const ComplexMatrix v0 = level_sector_matrix(ops.v, kLevelZero);
      const ComplexMatrix g0 = level_sector_matrix(ops.gamma, kLevelZero);
      for (const auto& [sector, values] :
           {std::pair<const ComplexMatrix*, const std::vector<double>*>{&v0, &s.energy},
            {&g0, &s.decay}}) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(*sector);
        std::vector<double> dft = *values;
        std::sort(dft.begin(), dft.end());
        for (int i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(dft[i] - eig.eigenvalues()(i)));
      }
      const ComplexMatrix u = ring_mode_matrix(n);
      for (int j = 0; j < n; ++j) {
        worst = std::max(worst,
                         (v0 * u.col(j) - s.energy[j] * u.col(j)).norm());
        worst = std::max(worst,
                         (g0 * u.col(j) - s.decay[j] * u.col(j)).norm());
      }
      double trace_sum = 0.0;
      for (double d : s.decay) trace_sum += d;
      worst = std::max(worst, std::abs(trace_sum - n));
    }
    check.measured = worst;
    check.pass = worst <= check.threshold;
    checks.push_back(check);
  }

  return checks;
}

}  // namespace subrad
