#pragma once

#include <vector>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"

namespace uwdm {

// Normalized per-channel power evolution over one span, sampled on a uniform
// z grid. rho(z, i) = P_i(z) / P_i(0), so rho(0, i) = 1 for every channel.
struct PowerEvolution {
  std::vector<double> z_km;     // n_z samples, z_km.front() = 0, back() = span
  std::vector<double> rho;      // n_z * n_ch, z-major rows
  std::vector<double> launch_mw;
  int n_ch = 0;

  int n_z() const { return static_cast<int>(z_km.size()); }
  double rho_at(int iz, int ich) const {
    return rho[static_cast<size_t>(iz) * n_ch + ich];
  }
  double end_rho(int ich) const { return rho_at(n_z() - 1, ich); }
  double z_spacing_km() const { return z_km.size() > 1 ? z_km[1] - z_km[0] : 0.0; }
};

struct SolverOptions {
  double rtol = 1e-8;
  double atol_mw = 1e-12;
  double z_spacing_km = 0.1;  // output sampling, not the internal step
};

// Integrates the coupled Raman power-transfer equations
//   dP_i/dz = -alpha_i P_i + P_i * sum_j sgn(f_j - f_i) g_ij P_j
// with photon-conserving depletion (the pump-side term carries f_i/f_j) and
// pair overlap 2 A_ref / (A_i + A_j) applied to the tabulated gain. Uses an
// embedded Cash-Karp 4/5 pair with adaptive steps, forced to land on every
// output sample. Channels launched at zero power are carried at a tiny probe
// power so their rho stays defined.
PowerEvolution solve_span(const ChannelGrid& grid,
                          const std::vector<double>& launch_mw,
                          const FibreProfile& fibre, double span_km,
                          const SolverOptions& options = {});

// Gains of a per-channel power leveller that restores launch power after the
// span: G_i = 1 / rho(L, i).
std::vector<double> span_gain(const PowerEvolution& evolution);

}  // namespace uwdm
