#include "uwdm/nli_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "uwdm/units.hpp"

namespace uwdm {
namespace {

constexpr double kPi = std::numbers::pi;

// Powers below this are clamped before normalising eta, so a dark channel
// still gets a finite coefficient. reference_powers_mw records the clamp.
constexpr double kEtaFloorMw = 1e-6;

// Extent of the tabulated phase-mismatch axis; beyond it the link function
// is handled by its analytic 1/phi^2 + 1/phi^4 tail.
constexpr double kPhiTop = 6.0;

// A signal-channel pair (j, c) can act as interferer / idler for some probe
// only if the island in (f1, f2) space is non-empty, which needs
// |f_c - f_j| <= 1.5 * symbol rate.
constexpr double kPairReachThz = 1.5 * ChannelGrid::kSymbolRateTHz;

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.x.assign(static_cast<size_t>(n), 0.0);
  rule.w.assign(static_cast<size_t>(n), 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double p1 = x;
    double dp = 1.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0;
      p1 = x;
      for (int m = 2; m <= n; ++m) {
        double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[static_cast<size_t>(k)] = -x;
    rule.x[static_cast<size_t>(n - 1 - k)] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.w[static_cast<size_t>(k)] = w;
    rule.w[static_cast<size_t>(n - 1 - k)] = w;
  }
  return rule;
}

// Link-function table for one channel pair. F(phi) is the squared modulus
// of the z transform of p(z) = sqrt(rho_a rho_b) over one span; we keep F
// and its cumulative integral Phi on a uniform phi grid, plus the
// integration-by-parts coefficients of the tail beyond the grid.
struct PhiTable {
  double dphi = 0.0;
  double phi_top = 0.0;
  std::vector<double> f;
  std::vector<double> phi;
  double tail_a = 0.0;  // p(0)^2 + p(L)^2
  double tail_b = 0.0;  // (p'(0)^2 + p'(L)^2) / 3

  double tail_integral(double a, double b) const {
    return tail_a * (1.0 / a - 1.0 / b) +
           tail_b * (1.0 / (a * a * a) - 1.0 / (b * b * b));
  }

  // F(|x|); the link function is even in phi.
  double value(double x) const {
    double ax = std::abs(x);
    if (ax >= phi_top) {
      double x2 = ax * ax;
      return tail_a / x2 + 3.0 * tail_b / (x2 * x2);
    }
    double t = ax / dphi;
    auto k = static_cast<size_t>(t);
    if (k + 1 >= f.size()) k = f.size() - 2;
    double frac = t - static_cast<double>(k);
    return f[k] + frac * (f[k + 1] - f[k]);
  }

  // Integral of F from 0 to x, extended as an odd function of x. Inside a
  // grid cell the quadratic consistent with the stored trapezoid sums is
  // used, so the derivative of the interpolant matches the F table.
  double cumulative(double x) const {
    double ax = std::abs(x);
    double r;
    if (ax < phi_top) {
      double t = ax / dphi;
      auto k = static_cast<size_t>(t);
      if (k + 1 >= f.size()) k = f.size() - 2;
      double d = (t - static_cast<double>(k)) * dphi;
      r = phi[k] + f[k] * d + 0.5 * (f[k + 1] - f[k]) / dphi * d * d;
    } else {
      r = phi.back() + tail_integral(phi_top, ax);
    }
    return x < 0 ? -r : r;
  }
};

// Builds the table for samples p_k on a uniform z grid with pitch h_km.
// The transform of the piecewise-linear interpolant of p is evaluated in
// closed form segment by segment, which keeps the end-of-span ripple exact
// instead of depending on the phi sampling.
PhiTable build_table(const std::vector<double>& p, double h, double dphi) {
  PhiTable tab;
  tab.dphi = dphi;
  auto n_cells = static_cast<size_t>(std::ceil(kPhiTop / dphi - 1e-9));
  tab.phi_top = static_cast<double>(n_cells) * dphi;
  tab.f.assign(n_cells + 1, 0.0);
  tab.phi.assign(n_cells + 1, 0.0);

  const size_t n_seg = p.size() - 1;
  for (size_t k = 0; k < tab.f.size(); ++k) {
    double ph = static_cast<double>(k) * dphi;
    double w = ph * h;
    std::complex<double> e0, e1, rot;
    if (std::abs(w) < 1e-5) {
      // series in w keeps the phi -> 0 limit well conditioned
      e0 = h * std::complex<double>(1.0 - w * w / 6.0, w / 2.0 - w * w * w / 24.0);
      e1 = h * h *
           std::complex<double>(0.5 - w * w / 8.0, w / 3.0 - w * w * w / 30.0);
      rot = {std::cos(w), std::sin(w)};
    } else {
      rot = {std::cos(w), std::sin(w)};
      std::complex<double> jphi(0.0, ph);
      e0 = (rot - 1.0) / jphi;
      e1 = (h * rot - e0) / jphi;
    }
    // M = sum_k rot^k (p_k E0 + s_k E1); accumulate the two real-weighted
    // geometric sums with a running rotation.
    double ar = 0.0, ai = 0.0;  // sum rot^k p_k
    double br = 0.0, bi = 0.0;  // sum rot^k s_k
    double cr = 1.0, ci = 0.0;  // rot^k
    const double inv_h = 1.0 / h;
    for (size_t s = 0; s < n_seg; ++s) {
      double pk = p[s];
      double sk = (p[s + 1] - pk) * inv_h;
      ar += cr * pk;
      ai += ci * pk;
      br += cr * sk;
      bi += ci * sk;
      double nr = cr * rot.real() - ci * rot.imag();
      ci = cr * rot.imag() + ci * rot.real();
      cr = nr;
    }
    std::complex<double> m = std::complex<double>(ar, ai) * e0 +
                             std::complex<double>(br, bi) * e1;
    tab.f[k] = std::norm(m);
  }

  for (size_t k = 1; k < tab.phi.size(); ++k)
    tab.phi[k] = tab.phi[k - 1] + 0.5 * (tab.f[k - 1] + tab.f[k]) * dphi;

  double p0 = p.front();
  double pl = p.back();
  double dp0 = (p[1] - p[0]) / h;
  double dpl = (p[p.size() - 1] - p[p.size() - 2]) / h;
  tab.tail_a = p0 * p0 + pl * pl;
  tab.tail_b = (dp0 * dp0 + dpl * dpl) / 3.0;
  return tab;
}

// Integral of F over one island in interferer space. The island is the set
// of (u, v) = (f1 - f_probe, f2 - f_probe) with f1 in the probe slot, f2 in
// slot j (v centred on D) and f1 + f2 - f_probe in slot c (u + v centred on
// E). The u direction is integrated exactly through the cumulative table
// with the dispersion slope frozen per sub-segment; the v direction uses
// Gauss-Legendre panels split where the u window changes shape.
double island_integral(double D, double E, const PhiTable& tab, double beta2,
                       double pi_beta3, const GaussRule& gl) {
  const double B = ChannelGrid::kSymbolRateTHz;
  const double half = 0.5 * B;

  double v_lo = std::max(D - half, E - B);
  double v_hi = std::min(D + half, E + B);
  if (v_hi - v_lo <= 1e-15) return 0.0;

  double edges[5];
  int n_edges = 0;
  edges[n_edges++] = v_lo;
  for (double b : {E - half, E, E + half})
    if (b > v_lo + 1e-12 && b < v_hi - 1e-12) edges[n_edges++] = b;
  edges[n_edges++] = v_hi;
  std::sort(edges, edges + n_edges);

  double total = 0.0;
  for (int pnl = 0; pnl + 1 < n_edges; ++pnl) {
    double mid = 0.5 * (edges[pnl] + edges[pnl + 1]);
    double hw = 0.5 * (edges[pnl + 1] - edges[pnl]);
    for (size_t m = 0; m < gl.x.size(); ++m) {
      double v = mid + hw * gl.x[m];
      double u_lo = std::max(-half, E - half - v);
      double u_hi = std::min(half, E + half - v);
      if (u_hi - u_lo <= 0.0) continue;

      // sub-segments: split at u = 0 and cap the width so the frozen
      // dispersion slope stays representative
      double inner = 0.0;
      double bounds[2][2];
      int n_sides = 0;
      if (u_lo < 0.0 && u_hi > 0.0) {
        bounds[0][0] = u_lo;
        bounds[0][1] = 0.0;
        bounds[1][0] = 0.0;
        bounds[1][1] = u_hi;
        n_sides = 2;
      } else {
        bounds[0][0] = u_lo;
        bounds[0][1] = u_hi;
        n_sides = 1;
      }
      for (int side = 0; side < n_sides; ++side) {
        double a = bounds[side][0];
        double b = bounds[side][1];
        int n_sub = (b - a) > 0.25 * B ? 2 : 1;
        double step = (b - a) / n_sub;
        for (int s = 0; s < n_sub; ++s) {
          double ua = a + s * step;
          double ub = ua + step;
          double um = 0.5 * (ua + ub);
          double cc = -4.0 * kPi * kPi * v * (beta2 + pi_beta3 * (um + v));
          if (std::abs(cc) < 1e-10) {
            inner += tab.value(cc * um) * (ub - ua);
          } else {
            inner += (tab.cumulative(cc * ub) - tab.cumulative(cc * ua)) / cc;
          }
        }
      }
      total += gl.w[m] * hw * inner;
    }
  }
  return total;
}

void check_inputs(const ChannelGrid& grid, const std::vector<double>& powers,
                  const PowerEvolution& evolution, int n_spans,
                  const NliConfig& config) {
  const size_t n = grid.size();
  if (powers.size() != n)
    throw std::invalid_argument("compute_nli: power vector has " +
                                std::to_string(powers.size()) +
                                " entries for " + std::to_string(n) +
                                " channels");
  if (evolution.n_ch != n)
    throw std::invalid_argument(
        "compute_nli: power evolution covers " +
        std::to_string(evolution.n_ch) + " channels, grid has " +
        std::to_string(n));
  if (evolution.n_z() < 2)
    throw std::invalid_argument(
        "compute_nli: power evolution needs at least two z samples");
  if (n_spans < 1)
    throw std::invalid_argument("compute_nli: span count must be positive");
  if (config.n_r < 4)
    throw std::invalid_argument("compute_nli: n_r must be at least 4");
  if (!config.incoherent_spans)
    throw std::invalid_argument(
        "compute_nli: only incoherent span accumulation is implemented");

  for (size_t i = 0; i < n; ++i) {
    double p = powers[i];
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("compute_nli: channel " + std::to_string(i) +
                                  " has invalid power");
    double ref = evolution.launch_mw[i];
    if (std::abs(ref - p) > 1e-8 + 1e-9 * p)
      throw std::invalid_argument(
          "compute_nli: power evolution was solved at different launch "
          "powers (channel " +
          std::to_string(i) + ")");
  }

  const auto& z = evolution.z_km;
  double pitch = z[1] - z[0];
  for (size_t k = 1; k < z.size(); ++k) {
    if (std::abs((z[k] - z[k - 1]) - pitch) > 1e-9 * std::max(1.0, pitch))
      throw std::invalid_argument(
          "compute_nli: power evolution must be sampled on a uniform z grid");
  }
}

}  // namespace

NliResult compute_nli(const ChannelGrid& grid,
                      const std::vector<double>& powers_mw,
                      const FibreProfile& fibre,
                      const PowerEvolution& evolution, int n_spans,
                      const NliConfig& config) {
  check_inputs(grid, powers_mw, evolution, n_spans, config);

  const int n = static_cast<int>(grid.size());
  const auto& channels = grid.channels();
  const double fs = ChannelGrid::kSymbolRateTHz;
  const double span_km = evolution.z_km.back();
  const double h = evolution.z_spacing_km();
  const auto n_z = evolution.n_z();

  // sqrt(rho) per channel, contiguous in z
  std::vector<std::vector<double>> s_col(static_cast<size_t>(n));
  for (int ch = 0; ch < n; ++ch) {
    auto& col = s_col[static_cast<size_t>(ch)];
    col.resize(n_z);
    for (size_t iz = 0; iz < n_z; ++iz) {
      double r = evolution.rho_at(iz, static_cast<size_t>(ch));
      if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument(
            "compute_nli: power evolution contains an invalid sample");
      col[iz] = std::sqrt(r);
    }
  }

  // phase grid pitch: scaled by the resolution knob, capped so the ripple
  // with period 2 pi / L keeps at least ~12 samples per cycle at the default
  // resolution, and the whole pitch scales inversely with the knob so the
  // tables genuinely refine as n_r grows
  double dphi = std::min(0.008, 2.0 * kPi / (12.0 * span_km)) * 150.0 / config.n_r;

  // Tables for all pairs that can form an island: every channel with
  // itself, and index-adjacent channels close enough in frequency. Slot 2*j
  // holds pair (j, j), slot 2*j+1 pair (j, j+1) when present.
  std::vector<PhiTable> tables(static_cast<size_t>(2 * n));
  std::vector<char> has_up(static_cast<size_t>(n), 0);
  for (int j = 0; j + 1 < n; ++j) {
    double gap = channels[static_cast<size_t>(j + 1)].freq_thz -
                 channels[static_cast<size_t>(j)].freq_thz;
    has_up[static_cast<size_t>(j)] = gap <= kPairReachThz ? 1 : 0;
  }

  detail::parallel_for(2 * n, config.threads, [&](int slot) {
    int j = slot / 2;
    bool up = (slot % 2) != 0;
    if (up && (j + 1 >= n || !has_up[static_cast<size_t>(j)])) return;
    const auto& ca = s_col[static_cast<size_t>(j)];
    const auto& cb = s_col[static_cast<size_t>(up ? j + 1 : j)];
    std::vector<double> p(n_z);
    for (size_t iz = 0; iz < n_z; ++iz) p[iz] = ca[iz] * cb[iz];
    tables[static_cast<size_t>(slot)] = build_table(p, h, dphi);
  });

  // per-channel fibre parameters at the channel wavelengths
  std::vector<double> beta2(static_cast<size_t>(n)), pi_beta3(static_cast<size_t>(n)),
      gamma_mw(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto q = fibre.query(grid.wavelength_nm(static_cast<size_t>(i)));
    beta2[static_cast<size_t>(i)] = q.beta2_ps2_km;
    pi_beta3[static_cast<size_t>(i)] = kPi * q.beta3_ps3_km;
    gamma_mw[static_cast<size_t>(i)] = q.gamma_per_w_km * 1e-3;
  }

  NliResult result;
  result.n_spans = n_spans;
  result.eta_per_mw2.assign(static_cast<size_t>(n), 0.0);
  result.reference_powers_mw.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    result.reference_powers_mw[static_cast<size_t>(i)] =
        std::max(powers_mw[static_cast<size_t>(i)], kEtaFloorMw);

  const int n_nodes = std::max(3, static_cast<int>(std::lround(config.n_r / 12.0)));
  const GaussRule gl = gauss_legendre(n_nodes);

  detail::parallel_for(n, config.threads, [&](int i) {
    const double fi = channels[static_cast<size_t>(i)].freq_thz;
    const double b2 = beta2[static_cast<size_t>(i)];
    const double pb3 = pi_beta3[static_cast<size_t>(i)];
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double pj = powers_mw[static_cast<size_t>(j)];
      if (j == i) pj = result.reference_powers_mw[static_cast<size_t>(i)];
      if (pj <= 0.0) continue;
      const double dj = channels[static_cast<size_t>(j)].freq_thz - fi;
      const double mult = (j == i) ? 1.0 : 2.0;
      for (int c = j - 1; c <= j + 1; ++c) {
        if (c < 0 || c >= n) continue;
        if (c == j - 1 && !has_up[static_cast<size_t>(c)]) continue;
        if (c == j + 1 && !has_up[static_cast<size_t>(j)]) continue;
        double pc = powers_mw[static_cast<size_t>(c)];
        if (c == i) pc = result.reference_powers_mw[static_cast<size_t>(i)];
        if (pc <= 0.0) continue;
        const auto& tab =
            tables[static_cast<size_t>(c >= j ? 2 * j + (c - j) : 2 * c + 1)];
        double ec = channels[static_cast<size_t>(c)].freq_thz - fi;
        double island = island_integral(dj, ec, tab, b2, pb3, gl);
        acc += mult * pj * pc * island;
      }
    }
    double pref = result.reference_powers_mw[static_cast<size_t>(i)];
    double g = gamma_mw[static_cast<size_t>(i)];
    result.eta_per_mw2[static_cast<size_t>(i)] =
        n_spans * (16.0 / 27.0) * g * g * acc / (fs * fs * pref * pref);
  });

  return result;
}

int nli_dip_index(const NliResult& result, const ChannelGrid& grid) {
  if (result.eta_per_mw2.size() != grid.size())
    throw std::invalid_argument("nli_dip_index: result does not match grid");
  int best = -1;
  double best_eta = -1.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid.channels()[i].band != BandId::O) continue;
    if (result.eta_per_mw2[i] > best_eta) {
      best_eta = result.eta_per_mw2[i];
      best = static_cast<int>(i);
    }
  }
  if (best < 0)
    throw std::invalid_argument(
        "nli_dip_index: grid holds no O-band channels");
  return best;
}

}  // namespace uwdm
