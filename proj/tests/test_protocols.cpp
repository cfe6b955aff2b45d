#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subrad/io.hpp"
#include "subrad/protocols.hpp"
#include "subrad/run_config.hpp"

using namespace subrad;

namespace {

bool identical_files(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

}  // namespace

TEST_CASE("sample grid construction") {
  const SampleGrid grid{1e-3, 1.05, 0.1};
  const auto times = grid.build(0.0, 2.0);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == 2.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    CHECK(times[i] > times[i - 1]);
    CHECK(times[i] - times[i - 1] <= 0.1 + 1e-12);
  }
  // deterministic
  CHECK(grid.build(0.0, 2.0) == times);
  CHECK_THROWS_AS(grid.build(1.0, 1.0), std::invalid_argument);

  const auto merged = merge_grids({0.0, 1.0, 2.0}, {0.5, 1.0, 1.5});
  CHECK(merged == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("non-interacting chain control decays at the vacuum rate") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.05};
  const PresetResult r = preset_chain_edge(10, 0.08, 5.0, true, options);
  for (std::size_t i = 0; i < r.series.size(); ++i)
    CHECK(r.series.p_sur[i] ==
          Catch::Approx(std::exp(-r.series.times[i])).epsilon(1e-6));
}

TEST_CASE("direction switch with no switches matches the chain preset") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.05};
  const PresetResult plain = preset_chain_edge(10, 0.08, 3.0, false, options);

  DirectionSwitchOptions swopt;
  swopt.delta = 500.0;
  swopt.t_final = 3.0;
  swopt.grid = options.grid;
  const PresetResult switched = preset_direction_switch(10, 0.08, swopt);
  for (std::size_t i = 0; i < plain.series.size(); ++i)
    CHECK(switched.series.p_sur[i] ==
          Catch::Approx(plain.series.p_sur[i]).margin(1e-9));
}

TEST_CASE("freeze preset rejects impossible switch timing") {
  FreezeOptions options;
  options.delta = 1000.0;
  options.t_min = 9.99;
  options.t_final = 10.0;
  CHECK_THROWS_AS(preset_freeze(10, 0.08, options), std::invalid_argument);
}

TEST_CASE("direction switch rejects overlapping ramps") {
  DirectionSwitchOptions options;
  options.delta = 1000.0;
  options.tau = 0.2;
  options.switch_times = {1.0, 1.1};
  options.t_final = 3.0;
  CHECK_THROWS_AS(preset_direction_switch(10, 0.08, options), std::invalid_argument);
}

TEST_CASE("zero-disorder ensemble reproduces the clean run bit for bit") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.05};
  options.pop_stride = 10;
  const TimeSeries clean =
      run_localized_release(build_ring(8, 0.08), 4.0, options);

  EnsembleSpec spec;
  spec.base = build_ring(8, 0.08);
  spec.sigma_over_a = 0.0;
  spec.realizations = 5;
  spec.seed = 99;
  const EnsembleResult ensemble = run_ensemble(
      spec, [&](const Geometry& g) { return run_localized_release(g, 4.0, options); });

  REQUIRE(ensemble.mean.size() == clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(ensemble.mean.p_sur[i] == clean.p_sur[i]);
    CHECK(ensemble.mean.activity[i] == clean.activity[i]);
  }
  for (std::size_t i = 0; i < clean.populations.size(); ++i)
    CHECK(ensemble.mean.populations[i] == clean.populations[i]);
}

TEST_CASE("ensembles are deterministic and thread-count independent") {
  PresetOptions options;
  options.grid = SampleGrid{2e-3, 1.1, 0.1};
  EnsembleSpec spec;
  spec.base = build_ring(8, 0.08);
  spec.sigma_over_a = 0.03;
  spec.realizations = 6;
  spec.seed = 31;
  auto runner = [&](const Geometry& g) {
    return run_localized_release(g, 3.0, options);
  };
  const EnsembleResult a = run_ensemble(spec, runner, 1);
  const EnsembleResult b = run_ensemble(spec, runner, 1);
  const EnsembleResult c = run_ensemble(spec, runner, 3);
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    CHECK(a.mean.p_sur[i] == b.mean.p_sur[i]);
    CHECK(a.mean.p_sur[i] == c.mean.p_sur[i]);
  }
  CHECK(a.ipr == b.ipr);
  CHECK(a.ipr == c.ipr);

  // distinct realizations actually differ under disorder
  const EnsembleResult kept = run_ensemble(spec, runner, 1, true);
  REQUIRE(kept.realizations.size() == 6);
  bool any_different = false;
  for (std::size_t i = 0; i < kept.realizations[0].size(); ++i)
    any_different = any_different ||
                    kept.realizations[0].p_sur[i] != kept.realizations[1].p_sur[i];
  CHECK(any_different);
}

TEST_CASE("preset summaries carry the documented fields") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.05};
  const PresetResult r = preset_ring_single_site(10, 0.08, 5.0, options);
  CHECK(r.summary.contains("plateau"));
  CHECK(r.summary.contains("t_pl"));
  CHECK(r.summary.contains("gamma_eff"));
  CHECK(r.summary.contains("fit_window"));
  CHECK(r.summary["preset"] == "ring_single_site");
  CHECK(r.summary["balance_residual"].get<double>() >= 0.0);
}

TEST_CASE("run config parsing and validation") {
  nlohmann::json j{{"preset", "ring_packet"}, {"n", 51},
                   {"a_over_lambda", 0.08},   {"t_final", 5.0},
                   {"k_center", -11},         {"sigma_ka", 0.19634954084936207},
                   {"seed", 7},               {"sample_dt", 0.01}};
  const RunConfig c = RunConfig::from_json(j);
  CHECK(c.preset == "ring_packet");
  CHECK(c.engine_kind() == Engine::Spectral);
  const nlohmann::json echo = c.to_json();
  CHECK(echo.at("k_center") == -11);
  CHECK(RunConfig::from_json(echo).sigma_ka == c.sigma_ka);

  nlohmann::json bad = j;
  bad["preset"] = "unknown";
  CHECK_THROWS_AS(RunConfig::from_json(bad), std::invalid_argument);
  bad = j;
  bad["n"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(bad), std::invalid_argument);
  bad = j;
  bad.erase("t_final");
  CHECK_THROWS(RunConfig::from_json(bad));
  bad = j;
  bad["engine"] = "exact";
  CHECK_THROWS_AS(RunConfig::from_json(bad), std::invalid_argument);

  nlohmann::json freeze{{"preset", "freeze"}, {"n", 10}, {"a_over_lambda", 0.08},
                        {"t_final", 6.0},     {"realizations", 3},
                        {"sigma_over_a", 0.01}};
  // freeze ensembles need an explicit switch time
  CHECK_THROWS_AS(execute_run(RunConfig::from_json(freeze)), std::invalid_argument);
}

TEST_CASE("execute_run produces a coherent clean result") {
  nlohmann::json j{{"preset", "ring_single_site"}, {"n", 8},
                   {"a_over_lambda", 0.08},        {"t_final", 3.0},
                   {"sample_dt", 0.05}};
  const RunOutput out = execute_run(RunConfig::from_json(j));
  CHECK(out.series.p_sur.front() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(out.summary["realizations"] == 1);
  CHECK(out.realization_series.empty());
}

TEST_CASE("execute_run ensemble path matches direct ensemble invocation") {
  nlohmann::json j{{"preset", "ring_single_site"}, {"n", 8},
                   {"a_over_lambda", 0.08},        {"t_final", 3.0},
                   {"sample_dt", 0.05},            {"sigma_over_a", 0.02},
                   {"realizations", 4},            {"seed", 5}};
  const RunConfig c = RunConfig::from_json(j);
  const RunOutput out = execute_run(c);

  EnsembleSpec spec;
  spec.base = build_ring(8, 0.08);
  spec.sigma_over_a = 0.02;
  spec.realizations = 4;
  spec.seed = 5;
  const EnsembleResult direct = run_ensemble(
      spec, [&](const Geometry& g) { return run_config_on_geometry(c, g); });
  for (std::size_t i = 0; i < direct.mean.size(); ++i)
    CHECK(out.series.p_sur[i] == direct.mean.p_sur[i]);
  CHECK(out.summary["mean_ipr"].get<double>() == direct.mean_ipr);
}

TEST_CASE("csv and binary outputs round-trip deterministically") {
  const auto dir = std::filesystem::temp_directory_path() / "subrad_io_test";
  std::filesystem::create_directories(dir);

  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.1, 0.1};
  options.pop_stride = 5;
  const TimeSeries series =
      run_localized_release(build_ring(6, 0.08), 2.0, options);
  io::write_series_csv(series, dir / "a.csv");
  io::write_series_csv(series, dir / "b.csv");
  CHECK(identical_files(dir / "a.csv", dir / "b.csv"));
  io::write_populations_csv(series, dir / "pa.csv");
  io::write_populations_csv(series, dir / "pb.csv");
  CHECK(identical_files(dir / "pa.csv", dir / "pb.csv"));

  const Operators ops = assemble(build_ring(5, 0.08));
  io::write_operator_binary(ops.heff, dir / "heff.bin");
  const ComplexMatrix back = io::read_operator_binary(dir / "heff.bin");
  CHECK(back.rows() == ops.heff.rows());
  CHECK((back - ops.heff).cwiseAbs().maxCoeff() == 0.0);

  const ExcitationState s = init_localized(build_ring(5, 0.08), 2, kLevelZero);
  io::write_state_binary(s.amps, dir / "state.bin");
  const ComplexVector vec = io::read_state_binary(dir / "state.bin");
  CHECK((vec - s.amps).cwiseAbs().maxCoeff() == 0.0);

  io::write_operator_csv(ops.v, dir / "v.csv");
  std::ifstream check(dir / "v.csv");
  std::string header;
  std::getline(check, header);
  CHECK(header == "row,col,re,im");

  const ModeSpectrum spec = ring_spectrum_m0(build_ring(6, 0.08));
  io::write_spectrum_csv(spec, dir / "spec.csv");
  std::ifstream spec_file(dir / "spec.csv");
  int lines = 0;
  std::string line;
  while (std::getline(spec_file, line)) ++lines;
  CHECK(lines == 7);  // header + one row per mode

  std::filesystem::remove_all(dir);
}

TEST_CASE("single-site ring release splits into mirror-symmetric packets") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.05};
  options.pop_stride = 1;
  const int n = 13, start = 4;
  const Geometry g = build_ring(n, 0.08);
  const TimeSeries s = run_localized_release(g, 1.5, options, false, start);
  for (std::size_t i = 0; i < s.populations.size(); ++i) {
    auto site_population = [&](int site) {
      double p = 0.0;
      for (int level = 0; level < kLevels; ++level)
        p += s.populations[i](flat_index(((site % n) + n) % n, level));
      return p;
    };
    for (int d = 1; d <= n / 2; ++d)
      CHECK(site_population(start + d) ==
            Catch::Approx(site_population(start - d)).margin(1e-10));
  }
}

TEST_CASE("zone-spanning packets disperse again") {
  PresetOptions options;
  options.grid = SampleGrid{1e-3, 1.05, 0.02};
  const PresetResult r = preset_ring_packet(51, 0.08, -11, 1.2, 2.0, options);
  const double growth =
      (r.series.width.back() - r.series.width.front()) / r.series.width.front();
  CHECK(growth > 0.5);
  CHECK(r.summary["packet_truncation_warning"].get<bool>());
}

TEST_CASE("freezing saturates with the Zeeman splitting") {
  // raising delta tenfold (tau ~ 1/delta) barely moves the stored survival
  double p_post[2];
  int idx = 0;
  for (double delta : {1e3, 1e4}) {
    FreezeOptions o;
    o.delta = delta;
    o.t_min = 1.79;
    o.t_final = 5.0;
    o.grid = SampleGrid{2e-4, 1.02, 0.01};
    const PresetResult r = preset_freeze(25, 0.08, o);
    std::size_t i = 0;
    while (i + 1 < r.series.size() && r.series.times[i] < 4.0) ++i;
    p_post[idx++] = r.series.p_sur[i];
  }
  CHECK(std::abs(p_post[1] - p_post[0]) / p_post[0] < 0.005);
}

TEST_CASE("diabatic switching leaks more population out of m=0") {
  auto max_leak = [](double tau) {
    const Geometry g = build_chain(25, 0.08);
    FreezeParams p;
    p.delta = 1000.0;
    p.t_min = 1.79;
    p.tau = tau;
    p.theta_f = magic_angle(2.0 * M_PI * 0.08);
    p.t_final = 3.0;
    p.grid = SampleGrid{2e-4, 1.02, 0.01};
    p.pop_stride = 1;
    const TimeSeries s = run_freeze_schedule(g, p);
    double leak = 0.0;
    for (std::size_t i = 0; i < s.populations.size(); ++i) {
      if (s.pop_times[i] < p.t_min) continue;
      double m = 0.0;
      for (int site = 0; site < 25; ++site)
        m += s.populations[i](flat_index(site, kLevelPlus)) +
             s.populations[i](flat_index(site, kLevelMinus));
      leak = std::max(leak, m);
    }
    return leak;
  };
  const double adiabatic = max_leak(0.05);   // tau = 50 / delta
  const double diabatic = max_leak(0.002);   // tau = 2 / delta
  CHECK(diabatic > adiabatic);
  CHECK(adiabatic < 1e-3);  // the followed state stays m=0 to good accuracy
}
