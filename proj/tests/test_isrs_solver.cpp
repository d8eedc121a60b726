#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"
#include "uwdm/units.hpp"

using namespace uwdm;

TEST_CASE("raman-free span decays exponentially") {
  // the toy profile has a zero raman table, so every channel just attenuates
  FibreProfile fibre = oracle::make_toy_profile(0.2, -21.7, 1.2);
  ChannelGrid grid = ChannelGrid::from_frequencies({193.3, 193.8, 194.3});
  std::vector<double> launch{1.0, 2.0, 0.5};

  PowerEvolution ev = solve_span(grid, launch, fibre, 80.0);
  const double alpha = attenuation_db_to_linear(0.2);
  for (int iz = 0; iz < ev.n_z(); ++iz) {
    double expect = std::exp(-alpha * ev.z_km[static_cast<size_t>(iz)]);
    for (int i = 0; i < 3; ++i)
      CHECK(ev.rho_at(iz, i) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(ev.end_rho(1) == doctest::Approx(0.025118864315095784).epsilon(1e-9));

  auto gain = span_gain(ev);
  CHECK(gain[1] == doctest::Approx(1.0 / 0.025118864315095784).epsilon(1e-9));
}

TEST_CASE("adaptive integration matches a fixed-step reference") {
  FibreProfile fibre = make_default_profile();
  ChannelGrid grid = ChannelGrid::from_frequencies({188.8, 193.8, 198.8});
  std::vector<double> launch{10.0, 10.0, 10.0};  // strong enough to transfer power

  PowerEvolution ev = solve_span(grid, launch, fibre, 80.0);
  std::vector<double> reference = oracle::rk4_end_powers_mw(grid, launch, fibre, 80.0, 0.001);

  for (int i = 0; i < 3; ++i) {
    double end_mw = launch[static_cast<size_t>(i)] * ev.end_rho(i);
    CHECK(end_mw == doctest::Approx(reference[static_cast<size_t>(i)]).epsilon(1e-6));
  }

  // power flows downhill in frequency: the low channel gains, the high loses
  double flat = std::exp(-fibre.attenuation_per_km(grid.wavelength_nm(1)) * 80.0);
  CHECK(launch[0] * ev.end_rho(0) > launch[2] * ev.end_rho(2));
  CHECK(ev.end_rho(0) > std::exp(-fibre.attenuation_per_km(grid.wavelength_nm(0)) * 80.0));
  CHECK(ev.end_rho(2) < std::exp(-fibre.attenuation_per_km(grid.wavelength_nm(2)) * 80.0));
  (void)flat;
}

TEST_CASE("raman transfer conserves photon count without attenuation") {
  // profile with negligible attenuation but the usual raman table: the total
  // photon flux sum(P_i / f_i) must be invariant
  std::vector<double> wl, att, disp, aeff, gamma;
  FibreProfile def = make_default_profile();
  for (int nm = 1250; nm <= 1690; nm += 5) {
    double w = static_cast<double>(nm);
    wl.push_back(w);
    att.push_back(1e-9);
    disp.push_back(def.dispersion_ps_nm_km(w));
    aeff.push_back(def.aeff_um2(w));
    gamma.push_back(def.gamma_per_w_km(w));
  }
  RamanGainTable raman = def.raman();
  FibreProfile lossless(wl, att, disp, aeff, gamma, raman);

  ChannelGrid grid = ChannelGrid::from_frequencies({186.0, 194.0, 202.0});
  std::vector<double> launch{5.0, 5.0, 5.0};
  PowerEvolution ev = solve_span(grid, launch, lossless, 80.0);

  double flux0 = 0.0, flux1 = 0.0;
  for (int i = 0; i < 3; ++i) {
    flux0 += launch[static_cast<size_t>(i)] / grid.freq_thz(i);
    flux1 += launch[static_cast<size_t>(i)] * ev.end_rho(i) / grid.freq_thz(i);
  }
  // tolerance absorbs the 1e-9 dB/km residual attenuation over the span
  CHECK(flux1 == doctest::Approx(flux0).epsilon(5e-7));

  // and real transfer happened
  CHECK(ev.end_rho(0) > 1.001);
  CHECK(ev.end_rho(2) < 0.999);
}

TEST_CASE("zero-power channels ride along as probes") {
  FibreProfile fibre = make_default_profile();
  ChannelGrid grid = ChannelGrid::from_frequencies({188.8, 193.8, 198.8});
  std::vector<double> launch{10.0, 0.0, 10.0};
  PowerEvolution ev = solve_span(grid, launch, fibre, 80.0);
  // rho stays defined and behaves like a probe between the two pumps
  CHECK(ev.end_rho(1) > 0.0);
  CHECK(std::isfinite(ev.end_rho(1)));
  CHECK(ev.launch_mw[1] == 0.0);
}

TEST_CASE("evolution grid shape follows the requested spacing") {
  FibreProfile fibre = make_default_profile();
  ChannelGrid grid = ChannelGrid::from_frequencies({193.8});
  SolverOptions options;
  options.z_spacing_km = 0.25;
  PowerEvolution ev = solve_span(grid, {1.0}, fibre, 80.0, options);
  CHECK(ev.n_z() == 321);
  CHECK(ev.z_km.front() == 0.0);
  CHECK(ev.z_km.back() == doctest::Approx(80.0));
  CHECK(ev.z_spacing_km() == doctest::Approx(0.25));
  CHECK(ev.n_ch == 1);
  for (int iz = 1; iz < ev.n_z(); ++iz)
    CHECK(ev.z_km[static_cast<size_t>(iz)] - ev.z_km[static_cast<size_t>(iz) - 1] ==
          doctest::Approx(0.25).epsilon(1e-12));

  // an awkward span length still lands exactly on the far end
  PowerEvolution odd = solve_span(grid, {1.0}, fibre, 80.3, options);
  CHECK(odd.z_km.back() == doctest::Approx(80.3));
  CHECK(odd.n_z() == 323);
}

TEST_CASE("solver input validation") {
  FibreProfile fibre = make_default_profile();
  ChannelGrid grid = ChannelGrid::from_frequencies({193.8, 194.0});
  CHECK_THROWS_AS(solve_span(grid, {1.0}, fibre, 80.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_span(grid, {1.0, -1.0}, fibre, 80.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_span(grid, {1.0, kInfinity}, fibre, 80.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_span(grid, {1.0, 1.0}, fibre, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_span(grid, {1.0, 1.0}, fibre, -5.0), std::invalid_argument);
  SolverOptions bad;
  bad.z_spacing_km = 0.0;
  CHECK_THROWS_AS(solve_span(grid, {1.0, 1.0}, fibre, 80.0, bad), std::invalid_argument);

  PowerEvolution empty;
  CHECK_THROWS_AS(span_gain(empty), std::invalid_argument);
}
