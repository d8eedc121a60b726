#include "uwdm/scenario_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "parallel.hpp"
#include "uwdm/table_io.hpp"
#include "uwdm/units.hpp"

namespace uwdm {
namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

const char* seg_mode_name(SegmentMode m) {
  return m == SegmentMode::kTable1 ? "table1" : "formula";
}

}  // namespace

std::vector<int> default_channel_schedule(const BandSet& bands, int step) {
  if (step < 1)
    throw std::invalid_argument(
        "default_channel_schedule: step must be positive");
  const int capacity = bands.capacity();
  std::vector<int> counts;
  for (int n = step; n < capacity; n += step) counts.push_back(n);

  // points where a band fills up, read off from the population order
  auto grid = build_grid(capacity, bands);
  std::map<BandId, int> last_step;
  for (const auto& ch : grid.channels()) {
    auto it = last_step.find(ch.band);
    int s = ch.added_step;
    if (it == last_step.end() || it->second < s) last_step[ch.band] = s;
  }
  for (const auto& [band, s] : last_step) counts.push_back(s + 1);

  counts.push_back(capacity);
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  return counts;
}

std::string scenario_id(const BandSet& bands, int n_channels, int spans,
                        double p_lim_dbm, double trx_snr_db, double span_km,
                        const OptimizerConfig& base) {
  std::string key;
  key += "bands=" + bands.to_string();
  key += ";n=" + std::to_string(n_channels);
  key += ";spans=" + std::to_string(spans);
  key += ";plim=" + format_double(p_lim_dbm);
  key += ";trx=" + format_double(trx_snr_db);
  key += ";span_km=" + format_double(span_km);
  key += ";nr=" + std::to_string(base.nli.n_r);
  key += ";nmbar=" + format_double(base.nli.n_m_bar);
  key += ";seg=" + std::string(seg_mode_name(base.segment_mode));
  key += ";init=" + format_double(base.init_dbm);
  key += ";box=" + format_double(base.lower_dbm) + ":" +
         format_double(base.upper_dbm);
  return hex16(fnv1a(key));
}

SweepResult run_sweep(const FibreProfile& fibre, const SweepRequest& request,
                      const std::vector<SweepPoint>& cached,
                      int curve_workers) {
  if (request.spans.empty() || request.p_lim_dbm.empty() ||
      request.trx_snr_db.empty())
    throw std::invalid_argument("run_sweep: empty scenario axis");

  std::vector<int> counts = request.channel_counts.empty()
                                ? default_channel_schedule(request.bands)
                                : request.channel_counts;
  const int capacity = request.bands.capacity();
  for (size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 1 || counts[k] > capacity)
      throw std::invalid_argument(
          "run_sweep: channel count " + std::to_string(counts[k]) +
          " outside 1.." + std::to_string(capacity));
    if (k > 0 && counts[k] <= counts[k - 1])
      throw std::invalid_argument(
          "run_sweep: channel counts must be strictly increasing");
  }

  std::unordered_map<std::string, const SweepPoint*> cache;
  for (const auto& p : cached) cache[p.scenario_id] = &p;

  struct Curve {
    int spans;
    double p_lim_dbm;
    double trx_snr_db;
  };
  std::vector<Curve> curves;
  for (int s : request.spans)
    for (double p : request.p_lim_dbm)
      for (double t : request.trx_snr_db) curves.push_back({s, p, t});

  std::vector<std::vector<SweepPoint>> per_curve(curves.size());
  std::atomic<int> computed{0}, skipped{0};

  detail::parallel_for(
      static_cast<int>(curves.size()), curve_workers, [&](int ci) {
        const Curve& cv = curves[static_cast<size_t>(ci)];
        auto& out = per_curve[static_cast<size_t>(ci)];
        out.reserve(counts.size());
        PowerProfileEdges warm;
        for (int n : counts) {
          std::string id =
              scenario_id(request.bands, n, cv.spans, cv.p_lim_dbm,
                          cv.trx_snr_db, request.base.span_km, request.base);
          auto hit = cache.find(id);
          if (hit != cache.end()) {
            out.push_back(*hit->second);
            skipped.fetch_add(1, std::memory_order_relaxed);
            continue;
          }

          auto grid = build_grid(n, request.bands);
          OptimizerConfig cfg = request.base;
          cfg.p_lim_dbm = cv.p_lim_dbm;
          cfg.trx_snr_db = cv.trx_snr_db;
          cfg.n_spans = cv.spans;
          cfg.warm_start = warm;
          auto opt = optimize_launch_powers(grid, fibre, cfg);
          warm = opt.edges;

          SweepPoint pt;
          pt.scenario_id = id;
          pt.n_channels = n;
          pt.bandwidth_thz = occupied_bandwidth_thz(grid);
          pt.spans = cv.spans;
          pt.p_lim_dbm = cv.p_lim_dbm;
          pt.trx_snr_db = cv.trx_snr_db;
          pt.throughput_tbps = opt.throughput_tbps;
          pt.total_power_dbm = mw_to_dbm(opt.total_power_mw);
          pt.tau = opt.tau;
          pt.converged = opt.converged;
          out.push_back(pt);
          computed.fetch_add(1, std::memory_order_relaxed);
        }
      });

  SweepResult result;
  result.computed = computed.load();
  result.skipped = skipped.load();
  for (auto& curve_points : per_curve)
    for (auto& p : curve_points) result.points.push_back(std::move(p));
  return result;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepPoint>& points,
                     const std::vector<std::string>& comments) {
  Table table;
  table.columns = {"scenario_id",     "n_channels", "bandwidth_THz",
                   "spans",           "p_lim_dBm",  "trx_snr_dB",
                   "throughput_Tbps", "total_power_dBm", "tau", "converged"};
  for (const auto& p : points) {
    table.rows.push_back({p.scenario_id, std::to_string(p.n_channels),
                          format_double(p.bandwidth_thz),
                          std::to_string(p.spans), format_double(p.p_lim_dbm),
                          format_double(p.trx_snr_db),
                          format_double(p.throughput_tbps),
                          format_double(p.total_power_dbm),
                          format_double(p.tau), p.converged ? "1" : "0"});
  }
  write_csv(path, table, comments);
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  Table table = read_csv(path);
  const std::vector<std::string> expected = {
      "scenario_id",     "n_channels", "bandwidth_THz",
      "spans",           "p_lim_dBm",  "trx_snr_dB",
      "throughput_Tbps", "total_power_dBm", "tau", "converged"};
  if (table.columns != expected)
    throw std::runtime_error("read_sweep_csv: '" + path +
                             "' does not have the sweep schema");

  std::vector<SweepPoint> points;
  for (const auto& row : table.rows) {
    SweepPoint p;
    p.scenario_id = row[0];
    p.n_channels = static_cast<int>(parse_double(row[1]));
    p.bandwidth_thz = parse_double(row[2]);
    p.spans = static_cast<int>(parse_double(row[3]));
    p.p_lim_dbm = parse_double(row[4]);
    p.trx_snr_db = parse_double(row[5]);
    p.throughput_tbps = parse_double(row[6]);
    p.total_power_dbm = parse_double(row[7]);
    p.tau = parse_double(row[8]);
    p.converged = row[9] == "1";
    points.push_back(std::move(p));
  }
  return points;
}

double saturation_bandwidth_thz(const std::vector<SweepPoint>& curve,
                                double fraction) {
  if (curve.empty())
    throw std::invalid_argument("saturation_bandwidth_thz: empty curve");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument(
        "saturation_bandwidth_thz: fraction must be in (0, 1]");
  for (size_t k = 1; k < curve.size(); ++k)
    if (!(curve[k].bandwidth_thz > curve[k - 1].bandwidth_thz))
      throw std::invalid_argument(
          "saturation_bandwidth_thz: curve must be ordered by increasing "
          "bandwidth");

  const double target = fraction * curve.back().throughput_tbps;
  if (curve.front().throughput_tbps >= target)
    return curve.front().bandwidth_thz;
  for (size_t k = 1; k < curve.size(); ++k) {
    if (curve[k].throughput_tbps >= target) {
      double c0 = curve[k - 1].throughput_tbps;
      double c1 = curve[k].throughput_tbps;
      double b0 = curve[k - 1].bandwidth_thz;
      double b1 = curve[k].bandwidth_thz;
      double t = (target - c0) / (c1 - c0);
      return b0 + t * (b1 - b0);
    }
  }
  return curve.back().bandwidth_thz;
}

}  // namespace uwdm
