#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/power_optimizer.hpp"
#include "uwdm/units.hpp"

using namespace uwdm;

namespace {

// cheap quadrature settings for the small grids used here
OptimizerConfig fast_config() {
  OptimizerConfig config;
  config.nli.n_r = 24;
  config.nli.threads = 2;
  return config;
}

}  // namespace

TEST_CASE("single channel settles at the stationary launch power") {
  // one channel has no inter-channel effects: at the optimum the analytic
  // first-order condition ase = 2 eta p^3 must hold with the eta and ase the
  // optimiser itself reports
  ChannelGrid grid = build_grid(1);
  FibreProfile fibre = make_default_profile();
  OptimizerConfig config = fast_config();
  config.upper_dbm = 20.0;  // keep the stationary point interior

  OptimizeResult result = optimize_launch_powers(grid, fibre, config);
  CHECK(result.converged);
  CHECK(result.tau == 1.0);
  REQUIRE(result.launch_mw.size() == 1);

  double p = result.launch_mw[0];
  double stationary = std::cbrt(result.ase_mw[0] / (2.0 * result.eta_per_mw2[0]));
  CHECK(p == doctest::Approx(stationary).epsilon(2e-3));

  // the reported snr and throughput follow from the same numbers
  double snr = p / (result.eta_per_mw2[0] * p * p * p + result.ase_mw[0]);
  CHECK(result.snr[0] == doctest::Approx(snr).epsilon(1e-12));
  CHECK(result.throughput_tbps ==
        doctest::Approx(2.0 * 0.148 * std::log2(1.0 + snr)).epsilon(1e-12));
  CHECK(result.total_power_mw == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("total power cap binds and is met exactly") {
  ChannelGrid grid = build_grid(8);
  FibreProfile fibre = make_default_profile();
  OptimizerConfig config = fast_config();
  config.p_lim_dbm = 5.0;

  OptimizeResult result = optimize_launch_powers(grid, fibre, config);
  CHECK(result.converged);
  CHECK(result.tau < 1.0);
  CHECK(result.total_power_mw == doctest::Approx(dbm_to_mw(5.0)).epsilon(1e-9));

  double sum = std::accumulate(result.launch_mw.begin(), result.launch_mw.end(), 0.0);
  CHECK(sum == doctest::Approx(dbm_to_mw(5.0)).epsilon(1e-9));

  // a slack cap changes nothing and reports tau = 1
  OptimizerConfig loose = fast_config();
  loose.p_lim_dbm = 40.0;
  OptimizeResult free_run = optimize_launch_powers(grid, fibre, loose);
  CHECK(free_run.tau == 1.0);
  CHECK(free_run.total_power_mw < dbm_to_mw(40.0));
  CHECK(free_run.throughput_tbps > result.throughput_tbps);
}

TEST_CASE("transceiver noise floor caps the attainable snr") {
  ChannelGrid grid = build_grid(4);
  FibreProfile fibre = make_default_profile();

  OptimizerConfig ideal = fast_config();
  OptimizeResult clean = optimize_launch_powers(grid, fibre, ideal);

  OptimizerConfig noisy = fast_config();
  noisy.trx_snr_db = 15.0;
  OptimizeResult capped = optimize_launch_powers(grid, fibre, noisy);

  CHECK(capped.throughput_tbps < clean.throughput_tbps);
  for (double s : capped.snr) CHECK(s < db_to_linear(15.0));
}

TEST_CASE("segment layout follows the band and the mode") {
  FibreProfile fibre = make_default_profile();

  // full C band, fixed per-band counts: 2 segments, 3 edges
  ChannelGrid full_c = build_grid(29);
  OptimizerConfig config = fast_config();
  config.max_outer_iterations = 1;  // layout is what matters here
  OptimizeResult r1 = optimize_launch_powers(full_c, fibre, config);
  CHECK(r1.edges.freq_thz.size() == 3);
  for (BandId b : r1.edges.band) CHECK(b == BandId::C);
  CHECK(r1.edges.freq_thz.front() == doctest::Approx(193.8 - 14 * 0.15));
  CHECK(r1.edges.freq_thz.back() == doctest::Approx(193.8 + 14 * 0.15));

  // same band under the segment-pitch formula: 4.35 THz / 1.5 THz -> 3
  config.segment_mode = SegmentMode::kFormula;
  OptimizeResult r2 = optimize_launch_powers(full_c, fibre, config);
  CHECK(r2.edges.freq_thz.size() == 4);

  // a partial band scales its segment count down
  config.segment_mode = SegmentMode::kTable1;
  ChannelGrid part_c = build_grid(10);
  OptimizeResult r3 = optimize_launch_powers(part_c, fibre, config);
  CHECK(r3.edges.freq_thz.size() == 2);

  // one-channel bands collapse to one edge; L sits below C in frequency so
  // its lone edge leads the list
  ChannelGrid c_plus_l = build_grid(30, BandSet::parse("CL"));
  OptimizeResult r4 = optimize_launch_powers(c_plus_l, fibre, config);
  CHECK(r4.edges.freq_thz.size() == 4);  // 1 L edge + 3 C edges
  CHECK(r4.edges.band.front() == BandId::L);
  CHECK(r4.edges.band.back() == BandId::C);
}

TEST_CASE("warm start reaches the same optimum faster") {
  ChannelGrid small = build_grid(6);
  ChannelGrid bigger = build_grid(8);
  FibreProfile fibre = make_default_profile();

  OptimizerConfig config = fast_config();
  OptimizeResult seed = optimize_launch_powers(small, fibre, config);

  OptimizerConfig warm = fast_config();
  warm.warm_start = seed.edges;
  OptimizeResult warmed = optimize_launch_powers(bigger, fibre, warm);

  OptimizerConfig cold = fast_config();
  OptimizeResult colded = optimize_launch_powers(bigger, fibre, cold);

  CHECK(warmed.converged);
  CHECK(warmed.throughput_tbps ==
        doctest::Approx(colded.throughput_tbps).epsilon(5e-3));
}

TEST_CASE("optimum beats naive flat launch profiles") {
  ChannelGrid grid = build_grid(8);
  FibreProfile fibre = make_default_profile();
  OptimizerConfig config = fast_config();
  OptimizeResult best = optimize_launch_powers(grid, fibre, config);

  // evaluate fixed flat profiles through the same machinery by pinning the
  // box to a single value
  for (double flat : {-6.0, 0.0, 6.0}) {
    OptimizerConfig pinned = fast_config();
    pinned.init_dbm = flat;
    pinned.lower_dbm = flat;
    pinned.upper_dbm = flat + 1e-9;
    pinned.max_outer_iterations = 2;
    OptimizeResult fixed = optimize_launch_powers(grid, fibre, pinned);
    CHECK(best.throughput_tbps >= fixed.throughput_tbps - 1e-9);
  }
}

TEST_CASE("power cap scale factor") {
  CHECK(power_cap_tau(10.0, 100.0) == 1.0);
  CHECK(power_cap_tau(200.0, 100.0) == 0.5);
  double p_lim = dbm_to_mw(15.0);
  CHECK(power_cap_tau(63.25, p_lim) ==
        doctest::Approx(p_lim / 63.25).epsilon(1e-14));
  CHECK(power_cap_tau(10.0, kInfinity) == 1.0);
  // a dark link is left alone even under a finite cap
  CHECK(power_cap_tau(0.0, 5.0) == 1.0);

  std::vector<double> powers = {50.0, 150.0};
  double tau = apply_power_cap(powers, 100.0);
  CHECK(tau == 0.5);
  CHECK(powers[0] == 25.0);
  CHECK(powers[1] == 75.0);
}

TEST_CASE("segment layout exposes the edge positions") {
  ChannelGrid grid = build_grid(29);
  PowerProfileEdges edges = segment_layout(grid, SegmentMode::kTable1);
  REQUIRE(edges.freq_thz.size() == 3);
  CHECK(edges.freq_thz[1] == doctest::Approx(193.8));
  for (double v : edges.value_dbm) CHECK(v == 0.0);
  CHECK(segment_layout(grid, SegmentMode::kFormula).freq_thz.size() == 4);
  CHECK_THROWS_AS(segment_layout(ChannelGrid{}, SegmentMode::kTable1),
                  std::invalid_argument);
}

TEST_CASE("frozen objective value and gradient") {
  ChannelGrid grid = build_grid(4);
  auto layout = segment_layout(grid, SegmentMode::kTable1);
  REQUIRE(layout.freq_thz.size() == 2);

  std::vector<double> eta = {1e-3, 2e-3, 1.5e-3, 0.8e-3};
  std::vector<double> ase = {2e-3, 2.2e-3, 1.9e-3, 2.1e-3};

  // flat edges make every channel power equal; the value must match the
  // throughput computed from the same ingredients
  std::vector<double> flat = {1.0, 1.0};
  EdgeObjective at_flat = edge_objective(grid, SegmentMode::kTable1, flat, eta,
                                         ase, kInfinity, kInfinity);
  std::vector<double> q(4, dbm_to_mw(1.0));
  double by_hand = 0.0;
  for (size_t i = 0; i < q.size(); ++i)
    by_hand += 2.0 * 0.148 *
               std::log2(1.0 + q[i] / (eta[i] * q[i] * q[i] * q[i] + ase[i]));
  CHECK(at_flat.value_tbps == doctest::Approx(-by_hand).epsilon(1e-12));

  // exact gradient against central differences on both sides of the cap
  for (double p_lim_dbm : {kInfinity, 3.0}) {
    std::vector<double> x = {0.5, -0.3};
    EdgeObjective at_x = edge_objective(grid, SegmentMode::kTable1, x, eta,
                                        ase, p_lim_dbm, 18.0);
    REQUIRE(at_x.gradient_per_dbm.size() == 2);
    const double h = 1e-5;
    for (size_t k = 0; k < x.size(); ++k) {
      auto xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      double fd = (edge_objective(grid, SegmentMode::kTable1, xp, eta, ase,
                                  p_lim_dbm, 18.0)
                       .value_tbps -
                   edge_objective(grid, SegmentMode::kTable1, xm, eta, ase,
                                  p_lim_dbm, 18.0)
                       .value_tbps) /
                  (2.0 * h);
      CHECK(at_x.gradient_per_dbm[k] == doctest::Approx(fd).epsilon(1e-4));
    }
  }

  CHECK_THROWS_AS(edge_objective(grid, SegmentMode::kTable1, {1.0}, eta, ase,
                                 kInfinity, kInfinity),
                  std::invalid_argument);
  CHECK_THROWS_AS(edge_objective(grid, SegmentMode::kTable1, flat, {1e-3}, ase,
                                 kInfinity, kInfinity),
                  std::invalid_argument);
}

TEST_CASE("configuration validation") {
  ChannelGrid grid = build_grid(2);
  FibreProfile fibre = make_default_profile();

  OptimizerConfig config;
  config.span_km = 0.0;
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);

  config = OptimizerConfig{};
  config.n_spans = 0;
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);

  config = OptimizerConfig{};
  config.lower_dbm = 5.0;
  config.upper_dbm = -5.0;
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);

  config = OptimizerConfig{};
  config.p_lim_dbm = -120.0;
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);

  config = OptimizerConfig{};
  config.max_outer_iterations = 0;
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);

  ChannelGrid empty;
  CHECK_THROWS_AS(optimize_launch_powers(empty, fibre, OptimizerConfig{}),
                  std::invalid_argument);

  // warm start with inconsistent vectors
  config = OptimizerConfig{};
  config.warm_start.freq_thz = {193.8};
  config.warm_start.value_dbm = {0.0, 1.0};
  config.warm_start.band = {BandId::C};
  CHECK_THROWS_AS(optimize_launch_powers(grid, fibre, config), std::invalid_argument);
}
