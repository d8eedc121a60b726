#include "uwdm/isrs_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uwdm/units.hpp"

namespace uwdm {

namespace {

constexpr double kProbeFloorMw = 1e-9;

// Raman coupling matrix K with dP_i/dz = P_i (-alpha_i + sum_j K_ij P_j).
// Powers in mW, so the tabulated 1/W/km efficiencies pick up a factor 1e-3.
struct Coupling {
  std::vector<double> alpha;  // 1/km
  std::vector<double> k;      // n x n, row-major
  int n = 0;

  void rhs(const double* p, double* dp) const {
    for (int i = 0; i < n; ++i) {
      const double* row = k.data() + static_cast<size_t>(i) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += row[j] * p[j];
      dp[i] = p[i] * (acc - alpha[i]);
    }
  }
};

Coupling build_coupling(const ChannelGrid& grid, const FibreProfile& fibre) {
  const int n = grid.size();
  Coupling c;
  c.n = n;
  c.alpha.resize(n);
  c.k.assign(static_cast<size_t>(n) * n, 0.0);

  std::vector<double> aeff(n);
  for (int i = 0; i < n; ++i) {
    double wl = grid.wavelength_nm(i);
    c.alpha[i] = fibre.attenuation_per_km(wl);
    aeff[i] = fibre.aeff_um2(wl);
  }
  const double a_ref = fibre.raman_reference_aeff();
  const RamanGainTable& table = fibre.raman();

  for (int i = 0; i < n; ++i) {
    double fi = grid.freq_thz(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double fj = grid.freq_thz(j);
      double g = table.gain_at(std::abs(fj - fi));
      if (g == 0.0) continue;
      g *= 2.0 * a_ref / (aeff[i] + aeff[j]);  // pair overlap
      g *= 1e-3;                               // 1/W/km -> 1/mW/km
      c.k[static_cast<size_t>(i) * n + j] = (fj > fi) ? g : -(fi / fj) * g;
    }
  }
  return c;
}

// Cash-Karp tableau.
constexpr double kB21 = 1.0 / 5.0;
constexpr double kB31 = 3.0 / 40.0, kB32 = 9.0 / 40.0;
constexpr double kB41 = 3.0 / 10.0, kB42 = -9.0 / 10.0, kB43 = 6.0 / 5.0;
constexpr double kB51 = -11.0 / 54.0, kB52 = 5.0 / 2.0, kB53 = -70.0 / 27.0,
                 kB54 = 35.0 / 27.0;
constexpr double kB61 = 1631.0 / 55296.0, kB62 = 175.0 / 512.0,
                 kB63 = 575.0 / 13824.0, kB64 = 44275.0 / 110592.0,
                 kB65 = 253.0 / 4096.0;
constexpr double kC1 = 37.0 / 378.0, kC3 = 250.0 / 621.0, kC4 = 125.0 / 594.0,
                 kC6 = 512.0 / 1771.0;
constexpr double kD1 = kC1 - 2825.0 / 27648.0, kD3 = kC3 - 18575.0 / 48384.0,
                 kD4 = kC4 - 13525.0 / 55296.0, kD5 = -277.0 / 14336.0,
                 kD6 = kC6 - 0.25;

}  // namespace

PowerEvolution solve_span(const ChannelGrid& grid,
                          const std::vector<double>& launch_mw,
                          const FibreProfile& fibre, double span_km,
                          const SolverOptions& options) {
  const int n = grid.size();
  if (static_cast<int>(launch_mw.size()) != n)
    throw std::invalid_argument("solve_span: power vector length " +
                                std::to_string(launch_mw.size()) + " != grid size " +
                                std::to_string(n));
  for (double p : launch_mw)
    if (p < 0.0 || !std::isfinite(p))
      throw std::invalid_argument("solve_span: launch powers must be finite and >= 0");
  if (span_km <= 0.0) throw std::invalid_argument("solve_span: span length must be positive");
  if (options.z_spacing_km <= 0.0)
    throw std::invalid_argument("solve_span: output spacing must be positive");

  const Coupling coupling = build_coupling(grid, fibre);

  std::vector<double> p0(launch_mw);
  for (double& p : p0) p = std::max(p, kProbeFloorMw);

  const int n_out = std::max(1, static_cast<int>(std::ceil(span_km / options.z_spacing_km - 1e-9)));
  const double dz_out = span_km / n_out;

  PowerEvolution ev;
  ev.n_ch = n;
  ev.launch_mw = launch_mw;
  ev.z_km.resize(static_cast<size_t>(n_out) + 1);
  ev.rho.resize((static_cast<size_t>(n_out) + 1) * n);
  for (int k = 0; k <= n_out; ++k) ev.z_km[static_cast<size_t>(k)] = k * dz_out;
  ev.z_km.back() = span_km;

  std::vector<double> y(p0), ytmp(n), yerr(n), ynew(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n);

  for (int i = 0; i < n; ++i) ev.rho[static_cast<size_t>(i)] = 1.0;

  double z = 0.0;
  double h = std::min(1.0, span_km);
  long steps = 0;

  for (int out = 1; out <= n_out; ++out) {
    const double z_target = ev.z_km[static_cast<size_t>(out)];
    while (z < z_target) {
      if (++steps > 5000000)
        throw std::runtime_error("solve_span: step budget exhausted near z = " +
                                 std::to_string(z) + " km");
      double hs = std::min(h, z_target - z);

      coupling.rhs(y.data(), k1.data());
      for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hs * kB21 * k1[i];
      coupling.rhs(ytmp.data(), k2.data());
      for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (kB31 * k1[i] + kB32 * k2[i]);
      coupling.rhs(ytmp.data(), k3.data());
      for (int i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (kB41 * k1[i] + kB42 * k2[i] + kB43 * k3[i]);
      coupling.rhs(ytmp.data(), k4.data());
      for (int i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (kB51 * k1[i] + kB52 * k2[i] + kB53 * k3[i] + kB54 * k4[i]);
      coupling.rhs(ytmp.data(), k5.data());
      for (int i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (kB61 * k1[i] + kB62 * k2[i] + kB63 * k3[i] +
                               kB64 * k4[i] + kB65 * k5[i]);
      coupling.rhs(ytmp.data(), k6.data());

      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        ynew[i] = y[i] + hs * (kC1 * k1[i] + kC3 * k3[i] + kC4 * k4[i] + kC6 * k6[i]);
        yerr[i] = hs * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] + kD5 * k5[i] + kD6 * k6[i]);
        double scale = options.atol_mw + options.rtol * std::abs(y[i]);
        err = std::max(err, std::abs(yerr[i]) / scale);
      }

      if (err <= 1.0) {
        z += hs;
        y.swap(ynew);
        double grow = (err > 1e-12) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = hs * std::clamp(grow, 0.2, 5.0);
      } else {
        double shrink = std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
        h = hs * shrink;
        if (h < 1e-10)
          throw std::runtime_error("solve_span: step size underflow at z = " +
                                   std::to_string(z) + " km");
      }
    }
    double* row = ev.rho.data() + static_cast<size_t>(out) * n;
    for (int i = 0; i < n; ++i) row[i] = y[i] / p0[static_cast<size_t>(i)];
  }
  return ev;
}

std::vector<double> span_gain(const PowerEvolution& evolution) {
  if (evolution.n_z() < 2)
    throw std::invalid_argument("span_gain: evolution has no end-of-span sample");
  std::vector<double> g(static_cast<size_t>(evolution.n_ch));
  for (int i = 0; i < evolution.n_ch; ++i) {
    double r = evolution.end_rho(i);
    if (r <= 0.0) throw std::runtime_error("span_gain: non-positive end rho");
    g[static_cast<size_t>(i)] = 1.0 / r;
  }
  return g;
}

}  // namespace uwdm
