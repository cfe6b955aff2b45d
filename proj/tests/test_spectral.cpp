#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "subrad/dynamics.hpp"
#include "subrad/spectral.hpp"

using namespace subrad;

TEST_CASE("ring spectrum equals dense diagonalization of the m=0 sector") {
  for (int n : {3, 5, 8, 12}) {
    const Geometry g = build_ring(n, 0.08);
    const Operators ops = assemble(g);
    const ModeSpectrum s = ring_spectrum_m0(g);

    for (auto [sector, values] :
         {std::pair{level_sector_matrix(ops.v, kLevelZero), s.energy},
          std::pair{level_sector_matrix(ops.gamma, kLevelZero), s.decay}}) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sector);
      std::sort(values.begin(), values.end());
      for (int i = 0; i < n; ++i)
        CHECK(values[i] == Catch::Approx(eig.eigenvalues()(i)).margin(1e-10));
    }
  }
}

TEST_CASE("plane waves are eigenstates of both sectors") {
  const int n = 10;
  const Geometry g = build_ring(n, 0.08);
  const Operators ops = assemble(g);
  const ModeSpectrum s = ring_spectrum_m0(g);
  const ComplexMatrix v0 = level_sector_matrix(ops.v, kLevelZero);
  const ComplexMatrix g0 = level_sector_matrix(ops.gamma, kLevelZero);
  const ComplexMatrix u = ring_mode_matrix(n);
  for (int j = 0; j < n; ++j) {
    CHECK((v0 * u.col(j) - s.energy[j] * u.col(j)).norm() < 1e-10);
    CHECK((g0 * u.col(j) - s.decay[j] * u.col(j)).norm() < 1e-10);
  }
}

TEST_CASE("two-atom ring spectrum: symmetric/antisymmetric pair") {
  const Geometry g = build_ring(2, 0.08);
  const Operators ops = assemble(g);
  const double v12 =
      ops.v(flat_index(0, kLevelZero), flat_index(1, kLevelZero)).real();
  const double g12 =
      ops.gamma(flat_index(0, kLevelZero), flat_index(1, kLevelZero)).real();
  const ModeSpectrum s = ring_spectrum_m0(g);
  std::vector<double> decay = s.decay, energy = s.energy;
  std::sort(decay.begin(), decay.end());
  std::sort(energy.begin(), energy.end());
  CHECK(decay[0] == Catch::Approx(1.0 - g12).epsilon(1e-12));
  CHECK(decay[1] == Catch::Approx(1.0 + g12).epsilon(1e-12));
  CHECK(energy[0] == Catch::Approx(-std::abs(v12)).epsilon(1e-12));
  CHECK(energy[1] == Catch::Approx(std::abs(v12)).epsilon(1e-12));
}

TEST_CASE("production ring spectrum: frozen reference values") {
  const ModeSpectrum s = ring_spectrum_m0(build_ring(51, 0.08));
  CHECK(subradiant_fraction(s) == Catch::Approx(42.0 / 51.0).epsilon(1e-14));

  // the superradiant set sits at small |p|
  for (int i = 0; i < s.n; ++i)
    CHECK(s.subradiant(i) == (std::abs(s.k[i]) > 4));

  // spot values from the high-precision oracle (tests/oracles)
  CHECK(s.energy[s.index_of(-11)] == Catch::Approx(1.223135174085028).epsilon(1e-12));
  // a 51-term O(1) cosine sum cancelling down to 4e-8: compare absolutely
  CHECK(s.decay[s.index_of(-11)] == Catch::Approx(3.98085236649e-8).margin(1e-12));
  CHECK(s.energy[s.index_of(0)] == Catch::Approx(13.399604977746586).epsilon(1e-12));
  CHECK(s.decay[s.index_of(0)] == Catch::Approx(6.97058952234).epsilon(1e-10));
  CHECK(s.decay[s.index_of(-25)] == Catch::Approx(1.25047906658e-34).margin(1e-12));

  // trace identity
  double sum = 0.0;
  for (double d : s.decay) sum += d;
  CHECK(sum == Catch::Approx(51.0).margin(1e-10));

  // k -> -k symmetry
  for (int k = 1; k <= 25; ++k) {
    CHECK(s.energy[s.index_of(k)] ==
          Catch::Approx(s.energy[s.index_of(-k)]).margin(1e-12));
    CHECK(s.decay[s.index_of(k)] ==
          Catch::Approx(s.decay[s.index_of(-k)]).margin(1e-12));
  }
}

TEST_CASE("denser lattices have more subradiant modes") {
  const double f005 = subradiant_fraction(ring_spectrum_m0(build_ring(51, 0.05)));
  const double f010 = subradiant_fraction(ring_spectrum_m0(build_ring(51, 0.10)));
  CHECK(f005 > f010);
}

TEST_CASE("group velocity") {
  const ModeSpectrum s = ring_spectrum_m0(build_ring(51, 0.08));
  CHECK(group_velocity(s, -11) == Catch::Approx(10.324746177397617).epsilon(1e-9));
  for (int k : {3, 7, 11, 20})
    CHECK(group_velocity(s, k) == Catch::Approx(-group_velocity(s, -k)).margin(1e-12));
  CHECK_THROWS_AS(group_velocity(s, -25), std::invalid_argument);
  CHECK_THROWS_AS(group_velocity(s, 25), std::invalid_argument);

  // the dispersion is approximately linear across the packet support
  const double v_center = group_velocity(s, -11);
  for (int k = -13; k <= -9; ++k)
    CHECK(std::abs(group_velocity(s, k) - v_center) <= 0.15 * std::abs(v_center));
}

TEST_CASE("spectrum input validation") {
  CHECK_THROWS_AS(ring_spectrum_m0(build_chain(8, 0.08)), std::invalid_argument);
  const Geometry noisy = sample_disordered(build_ring(8, 0.08), 0.05, 3);
  CHECK_THROWS_AS(ring_spectrum_m0(noisy), std::invalid_argument);
  Geometry tilted = build_ring(8, 0.08);
  tilted.axis = Vec3(0.0, 1.0, 0.0);
  CHECK_THROWS_AS(ring_spectrum_m0(tilted), std::invalid_argument);
}

TEST_CASE("magic angle") {
  // near field: acos(1/sqrt(3))
  CHECK(magic_angle(1e-3) ==
        Catch::Approx(std::acos(1.0 / std::sqrt(3.0))).margin(1e-3));

  // production value, frozen from the high-precision oracle
  const double kappa = 2.0 * M_PI * 0.08;
  const double theta_f = magic_angle(kappa);
  CHECK(theta_f == Catch::Approx(1.0062778855598790).epsilon(1e-12));
  CHECK(std::abs(v00_coefficient(kappa, theta_f)) <= 1e-12);

  // bracket sign at the pi/2 endpoint
  CHECK(v00_coefficient(kappa, M_PI / 2) > 0.0);
}

TEST_CASE("sign flip angle") {
  const double kappa = 2.0 * M_PI * 0.08;
  const SignFlipAngle flip = sign_flip_angle(kappa);
  CHECK(flip.exact);
  CHECK(flip.theta == Catch::Approx(0.71267266969148661).epsilon(1e-10));
  CHECK(flip.theta < magic_angle(kappa));
  CHECK(flip.achieved == Catch::Approx(flip.target).epsilon(1e-10));
  CHECK(flip.target == Catch::Approx(-v00_coefficient(kappa, M_PI / 2)).epsilon(1e-14));

  // near field: exact flip angle exists at acos(sqrt(2/3))
  const SignFlipAngle near = sign_flip_angle(1e-3);
  CHECK(near.exact);
  CHECK(near.theta == Catch::Approx(std::acos(std::sqrt(2.0 / 3.0))).margin(1e-3));
}

TEST_CASE("subradiant fraction counts strictly below gamma") {
  ModeSpectrum s;
  s.n = 4;
  s.decay = {1.0, 1.0, 1.0, 1.0};
  CHECK(subradiant_fraction(s) == 0.0);
  s.decay = {0.5, 1.0, 2.0, 0.99};
  CHECK(subradiant_fraction(s) == 0.5);
}
