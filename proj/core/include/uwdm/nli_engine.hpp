#pragma once

#include <vector>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"

namespace uwdm {

struct NliConfig {
  // Island quadrature resolution: scales the Gauss-Legendre node count along
  // the interferer axis and the resolution of the link-function tables.
  int n_r = 150;
  // Multiplier on the z-sample density of the power evolution consumed by the
  // link-function quadrature. Honoured by the drivers that solve the span
  // (they request 0.1 km / n_m_bar output spacing); compute_nli itself uses
  // whatever z grid the evolution carries.
  double n_m_bar = 1.4;
  // Spans accumulate incoherently (eta scales linearly with span count).
  bool incoherent_spans = true;
  int threads = 0;  // 0 = hardware concurrency
};

struct NliResult {
  std::vector<double> eta_per_mw2;        // full-link eta, NLI power = eta * P^3
  std::vector<double> reference_powers_mw;
  int n_spans = 1;
};

// Per-channel nonlinear interference coefficients for the whole link.
// Gaussian-noise integral with the ISRS-aware link function; contributions
// are accumulated per interfering channel (plus the self term), each island
// integrated with the phase-matched axis handled in mismatch space so the
// sharp ridge and the end-of-span ripple are captured exactly.
NliResult compute_nli(const ChannelGrid& grid,
                      const std::vector<double>& powers_mw,
                      const FibreProfile& fibre,
                      const PowerEvolution& evolution, int n_spans,
                      const NliConfig& config = {});

// Index of the strongest-eta O-band channel (the zero-dispersion hot spot).
// Throws if the grid holds no O-band channels.
int nli_dip_index(const NliResult& result, const ChannelGrid& grid);

}  // namespace uwdm
