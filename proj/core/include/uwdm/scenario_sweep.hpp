#pragma once

#include <string>
#include <vector>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/power_optimizer.hpp"
#include "uwdm/units.hpp"

namespace uwdm {

// One optimised operating point of a bandwidth-expansion curve.
struct SweepPoint {
  std::string scenario_id;  // stable hash of everything that defines the point
  int n_channels = 0;
  double bandwidth_thz = 0.0;  // occupied bandwidth of the populated slots
  int spans = 0;
  double p_lim_dbm = 0.0;
  double trx_snr_db = 0.0;
  double throughput_tbps = 0.0;
  double total_power_dbm = 0.0;
  double tau = 1.0;
  bool converged = false;
};

struct SweepRequest {
  BandSet bands = BandSet::all();
  std::vector<int> channel_counts;  // ascending; empty = default schedule
  std::vector<int> spans{1};
  std::vector<double> p_lim_dbm{kInfinity};
  std::vector<double> trx_snr_db{kInfinity};
  OptimizerConfig base;  // cap/transceiver/span fields overwritten per point
};

struct SweepResult {
  std::vector<SweepPoint> points;  // canonical order: curve by curve
  int computed = 0;
  int skipped = 0;
};

// Channel counts every `step` channels plus each point where a band
// completes, capped at the capacity of the selected bands.
std::vector<int> default_channel_schedule(const BandSet& bands, int step = 10);

// The hash key that identifies a point across runs.
std::string scenario_id(const BandSet& bands, int n_channels, int spans,
                        double p_lim_dbm, double trx_snr_db, double span_km,
                        const OptimizerConfig& base);

// Runs every curve in the request (cross product of spans, cap and
// transceiver lists), channel counts in ascending order with warm-started
// launch profiles along each curve. Points whose scenario id appears in
// `cached` are copied over instead of recomputed. Curves can run in
// parallel; the result order does not depend on the worker count.
SweepResult run_sweep(const FibreProfile& fibre, const SweepRequest& request,
                      const std::vector<SweepPoint>& cached = {},
                      int curve_workers = 1);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepPoint>& points,
                     const std::vector<std::string>& comments = {});
std::vector<SweepPoint> read_sweep_csv(const std::string& path);

// Smallest occupied bandwidth at which a curve reaches `fraction` of its
// final throughput, linearly interpolated between schedule points. The
// curve must be ordered by increasing bandwidth.
double saturation_bandwidth_thz(const std::vector<SweepPoint>& curve,
                                double fraction = 0.9);

}  // namespace uwdm
