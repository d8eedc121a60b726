#pragma once

#include <vector>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"
#include "uwdm/nli_engine.hpp"
#include "uwdm/units.hpp"

namespace uwdm {

// How many piecewise-linear power segments each band gets.
enum class SegmentMode {
  kFormula,  // segment pitch: 750 GHz in the O band, 1.5 THz elsewhere
  kTable1,   // fixed per-band segment counts: O 15, E 6, S 4, C 2, L 3, U 2
};

// Segment-edge control points of a launch-power profile: per edge its band,
// frequency and value in dBm. Also serves as a warm start for a later run;
// edges are re-interpolated onto the new segment layout band by band.
struct PowerProfileEdges {
  std::vector<BandId> band;
  std::vector<double> freq_thz;
  std::vector<double> value_dbm;

  bool empty() const { return freq_thz.empty(); }
};

struct OptimizerConfig {
  SegmentMode segment_mode = SegmentMode::kTable1;
  double p_lim_dbm = kInfinity;  // total launch power cap
  double trx_snr_db = kInfinity;
  int n_spans = 1;
  double span_km = 80.0;
  NliConfig nli;

  double init_dbm = 0.0;
  double lower_dbm = -30.0;
  double upper_dbm = 10.0;
  int max_inner_iterations = 500;
  double inner_gradient_tolerance = 1e-6;
  int max_outer_iterations = 10;
  double outer_rel_tolerance = 1e-3;

  PowerProfileEdges warm_start;  // empty = flat start at init_dbm
};

struct OptimizeResult {
  std::vector<double> launch_mw;  // per channel, cap scaling applied
  std::vector<double> snr;        // linear, at the returned launch powers
  std::vector<double> eta_per_mw2;
  std::vector<double> ase_mw;
  double throughput_tbps = 0.0;
  double total_power_mw = 0.0;
  double tau = 1.0;  // cap scaling actually applied at the optimum
  PowerProfileEdges edges;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations_total = 0;
};

// Maximises Shannon throughput over the segment-edge launch powers, subject
// to per-edge box bounds and the total-power cap. The cap enters as a
// uniform scale factor tau = min(1, P_lim / sum P) applied before the link
// is evaluated, so the optimiser can trade power between channels while the
// total stays pinned. Nonlinear coefficients and ASE are refreshed around
// the inner solves until the throughput settles.
OptimizeResult optimize_launch_powers(const ChannelGrid& grid,
                                      const FibreProfile& fibre,
                                      const OptimizerConfig& config);

// The cap scale factor itself: min(1, p_lim / total). A link carrying no
// power is left alone (tau = 1), also under a finite cap.
double power_cap_tau(double total_power_mw, double p_lim_mw);

// Scales the powers in place by the cap factor and returns it.
double apply_power_cap(std::vector<double>& powers_mw, double p_lim_mw);

// The segment-edge positions the optimiser would use for this grid, with
// zero-filled values. Lets callers size and label edge vectors up front.
PowerProfileEdges segment_layout(const ChannelGrid& grid, SegmentMode mode);

// One evaluation of the inner objective: negated total throughput in Tbps
// as a function of the segment-edge powers, with the per-channel nonlinear
// coefficients and ASE held fixed, plus its exact gradient with respect to
// the edge values. Once the cap binds it couples every edge; both branches
// are differentiated.
struct EdgeObjective {
  double value_tbps = 0.0;  // negated throughput
  std::vector<double> gradient_per_dbm;
};

EdgeObjective edge_objective(const ChannelGrid& grid, SegmentMode mode,
                             const std::vector<double>& edge_dbm,
                             const std::vector<double>& eta_per_mw2,
                             const std::vector<double>& ase_mw,
                             double p_lim_dbm, double trx_snr_db);

}  // namespace uwdm
