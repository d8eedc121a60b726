// Acceptance battery for the link model and launch-power optimiser. Every
// numbered check prints exactly one [PASS]/[FAIL] line on stdout with the
// measured quantity and the band it has to land in; the process exits
// non-zero if any check fails. Progress and timing go to stderr. The
// quadrature knob (--nr) trades accuracy for runtime without moving any
// pass band; the registered ctest invocation uses 48.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"
#include "uwdm/nli_engine.hpp"
#include "uwdm/noise_budget.hpp"
#include "uwdm/power_optimizer.hpp"
#include "uwdm/scenario_sweep.hpp"
#include "uwdm/table_io.hpp"
#include "uwdm/units.hpp"

using namespace uwdm;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

double rel_dev(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// Per-channel eta and ASE of one link evaluated at fixed launch powers; the
// common preamble of the gradient and hot-spot checks.
struct LinkPieces {
  std::vector<double> eta;
  std::vector<double> ase;
};

LinkPieces link_at(const ChannelGrid& grid, const FibreProfile& fibre,
                   const std::vector<double>& launch_mw, int n_spans,
                   const NliConfig& ncfg) {
  SolverOptions sopt;
  sopt.z_spacing_km = 0.1 / ncfg.n_m_bar;
  auto evolution = solve_span(grid, launch_mw, fibre, 80.0, sopt);
  LinkPieces out;
  out.eta = compute_nli(grid, launch_mw, fibre, evolution, n_spans, ncfg)
                .eta_per_mw2;
  auto gains = span_gain(evolution);
  for (double& g : gains) g = std::max(g, 1.0);
  out.ase = ase_power_mw(grid, gains, n_spans);
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Stopwatch g_clock;

void progress(const std::string& what) {
  std::fprintf(stderr, "[%7.1fs] %s\n", g_clock.seconds(), what.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance battery for the throughput simulator"};
  int nr = 48;
  int threads = 0;
  std::string out_dir;
  app.add_option("--nr", nr, "island quadrature resolution")
      ->check(CLI::Range(4, 10000));
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out", out_dir, "directory for artifact CSVs (optional)");
  CLI11_PARSE(app, argc, argv);
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? static_cast<int>(hw) : 1;
  }

  const FibreProfile fibre = make_default_profile();
  NliConfig ncfg;
  ncfg.n_r = nr;
  ncfg.threads = threads;

  std::vector<Verdict> checks(9);

  // 1. the total-power cap is met exactly once the unconstrained optimum
  //    exceeds it (C band, 29 channels, one span, 15 dBm cap)
  {
    ChannelGrid grid = build_grid(29);
    OptimizerConfig cfg;
    cfg.nli = ncfg;
    cfg.p_lim_dbm = 15.0;
    auto capped = optimize_launch_powers(grid, fibre, cfg);
    OptimizerConfig free_cfg = cfg;
    free_cfg.p_lim_dbm = kInfinity;
    auto unconstrained = optimize_launch_powers(grid, fibre, free_cfg);

    const double cap_mw = dbm_to_mw(15.0);
    double gap = std::abs(capped.total_power_mw - cap_mw);
    bool binds = unconstrained.total_power_mw > cap_mw;
    checks[0].pass = capped.converged && binds &&
                     capped.total_power_mw <= cap_mw + 1e-9 && gap <= 1e-9;
    checks[0].detail = "total " + fmt(capped.total_power_mw, 12) +
                       " mW vs cap " + fmt(cap_mw, 12) + " mW, gap " +
                       fmt(gap, 3) + " mW (tol 1e-9); unconstrained total " +
                       fmt(unconstrained.total_power_mw) + " mW exceeds cap";
    progress("check 1 done (constrained C-band optimum)");
  }

  // 2. cap scale factor arithmetic, exact to 1e-12 relative
  {
    double t1 = power_cap_tau(10.0, 100.0);
    double t2 = power_cap_tau(200.0, 100.0);
    double p15 = dbm_to_mw(15.0);
    double t3 = power_cap_tau(63.25, p15);
    double want3 = p15 / 63.25;
    std::vector<double> v = {40.0, 23.25};
    double t4 = apply_power_cap(v, p15);
    bool sum_ok = v[0] + v[1] <= p15 * (1.0 + 1e-12);
    checks[1].pass = t1 == 1.0 && rel_dev(t2, 0.5) <= 1e-12 &&
                     rel_dev(t3, want3) <= 1e-12 && t4 == t3 && sum_ok;
    checks[1].detail = "tau(10,100)=" + fmt(t1, 12) + ", tau(200,100)=" +
                       fmt(t2, 12) + ", tau(63.25 mW, 15 dBm)=" + fmt(t3, 12) +
                       " vs " + fmt(want3, 12) + " (tol 1e-12 rel)";
  }

  // 3. engine eta against the brute-force closed-form quadrature on the
  //    constant-beta2 toy fibre, 3- and 9-channel systems, <= 1% per channel
  {
    const double alpha_db = 0.2, beta2 = -21.7, gamma = 1.2;
    FibreProfile toy = oracle::make_toy_profile(alpha_db, beta2, gamma);
    double alpha_lin = attenuation_db_to_linear(alpha_db);
    NliConfig toy_cfg = ncfg;
    toy_cfg.n_r = 150;
    SolverOptions sopt;
    sopt.z_spacing_km = 0.1 / toy_cfg.n_m_bar;

    ChannelGrid g3 = ChannelGrid::from_frequencies({193.65, 193.8, 193.95});
    std::vector<double> p3(3, 1.0);
    auto ev3 = solve_span(g3, p3, toy, 80.0, sopt);
    auto eta3 = compute_nli(g3, p3, toy, ev3, 1, toy_cfg).eta_per_mw2;
    auto ref3 =
        oracle::toy_eta_per_mw2(g3, p3, alpha_lin, beta2, gamma, 80.0, 1);
    double worst3 = 0.0;
    for (size_t i = 0; i < eta3.size(); ++i)
      worst3 = std::max(worst3, rel_dev(eta3[i], ref3[i]));

    std::vector<double> f9(9), p9 = {0.4, 1.2, 0.8, 2.0, 0.6,
                                     1.5, 1.0, 0.9, 1.1};
    for (int k = 0; k < 9; ++k) f9[static_cast<size_t>(k)] = 193.2 + 0.15 * k;
    ChannelGrid g9 = ChannelGrid::from_frequencies(f9);
    auto ev9 = solve_span(g9, p9, toy, 80.0, sopt);
    auto eta9 = compute_nli(g9, p9, toy, ev9, 3, toy_cfg).eta_per_mw2;
    auto ref9 =
        oracle::toy_eta_per_mw2(g9, p9, alpha_lin, beta2, gamma, 80.0, 3);
    double worst9 = 0.0;
    for (size_t i = 0; i < eta9.size(); ++i)
      worst9 = std::max(worst9, rel_dev(eta9[i], ref9[i]));

    checks[2].pass = worst3 <= 0.01 && worst9 <= 0.01;
    checks[2].detail = "worst channel deviation " + fmt(worst3, 3) +
                       " (3-ch) and " + fmt(worst9, 3) + " (9-ch), tol 0.01";
    progress("check 3 done (eta oracle)");

    // 9(iii) reuses the 9-channel toy system: quadrature refinement has to
    // close in on the n_r = 300 reference monotonically
    auto eta_at = [&](int res) {
      NliConfig c = ncfg;
      c.n_r = res;
      return compute_nli(g9, p9, toy, ev9, 3, c).eta_per_mw2;
    };
    auto eta300 = eta_at(300);
    auto dev_vs_300 = [&](const std::vector<double>& eta) {
      double worst = 0.0;
      for (size_t i = 0; i < eta.size(); ++i)
        worst = std::max(worst, rel_dev(eta[i], eta300[i]));
      return worst;
    };
    double d32 = dev_vs_300(eta_at(32));
    double d64 = dev_vs_300(eta_at(64));
    double d150 = dev_vs_300(eta_at(150));
    bool refine_ok = d32 > d64 && d64 > d150 && d150 > 0.0;

    // 9(ii) thread-count invariance of the same computation, bit for bit
    NliConfig one = toy_cfg;
    one.threads = 1;
    NliConfig two = toy_cfg;
    two.threads = 2;
    auto eta_t1 = compute_nli(g9, p9, toy, ev9, 3, one).eta_per_mw2;
    auto eta_t2 = compute_nli(g9, p9, toy, ev9, 3, two).eta_per_mw2;
    bool thread_ok = eta_t1 == eta_t2;

    checks[8].pass = refine_ok && thread_ok;  // more pieces added below
    checks[8].detail = "eta deviation vs n_r=300: " + fmt(d32, 3) + " @32 > " +
                       fmt(d64, 3) + " @64 > " + fmt(d150, 3) +
                       " @150; thread invariance " +
                       (thread_ok ? "exact" : "BROKEN");
    progress("check 9 quadrature-refinement piece done");
  }

  // 4. span solver against a 1 m fixed-step reference and against the
  //    closed-form decay of a Raman-free fibre
  {
    ChannelGrid grid = ChannelGrid::from_frequencies({188.8, 193.8, 198.8});
    std::vector<double> launch(3, 10.0);
    auto ev = solve_span(grid, launch, fibre, 80.0, {});
    auto rk4 = oracle::rk4_end_powers_mw(grid, launch, fibre, 80.0, 0.001);
    double worst_rk4 = 0.0;
    for (int i = 0; i < 3; ++i)
      worst_rk4 = std::max(
          worst_rk4, rel_dev(ev.end_rho(i) * launch[static_cast<size_t>(i)],
                             rk4[static_cast<size_t>(i)]));

    FibreProfile toy = oracle::make_toy_profile(0.2, -21.7, 1.2);
    ChannelGrid g3 = ChannelGrid::from_frequencies({193.65, 193.8, 193.95});
    std::vector<double> p3(3, 1.0);
    auto ev_toy = solve_span(g3, p3, toy, 80.0, {});
    double worst_decay = 0.0;
    for (int iz = 0; iz < ev_toy.n_z(); ++iz)
      for (int i = 0; i < 3; ++i) {
        double a = toy.attenuation_per_km(g3.wavelength_nm(i));
        double want = std::exp(-a * ev_toy.z_km[static_cast<size_t>(iz)]);
        worst_decay = std::max(worst_decay, rel_dev(ev_toy.rho_at(iz, i), want));
      }

    checks[3].pass = worst_rk4 <= 1e-6 && worst_decay <= 1e-9;
    checks[3].detail = "end-of-span deviation vs 1 m reference " +
                       fmt(worst_rk4, 3) + " (tol 1e-6); pure-attenuation " +
                       fmt(worst_decay, 3) + " (tol 1e-9)";
    progress("check 4 done (span solver oracles)");
  }

  // 5. analytic objective gradient against central differences on both
  //    sides of the cap branch point (29-channel C band)
  {
    ChannelGrid grid = build_grid(29);
    std::vector<double> flat(29, 1.0);
    LinkPieces link = link_at(grid, fibre, flat, 1, ncfg);
    std::vector<double> x = {0.3, -0.2, 0.4};  // table-1 C layout: 3 edges

    double worst = 0.0;
    // flat launch sums to ~29 mW: 20 dBm leaves the cap slack, 10 dBm binds
    for (double p_lim_dbm : {20.0, 10.0}) {
      auto at = [&](const std::vector<double>& e) {
        return edge_objective(grid, SegmentMode::kTable1, e, link.eta,
                              link.ase, p_lim_dbm, kInfinity);
      };
      auto analytic = at(x);
      const double h = 1e-4;
      std::vector<double> fd(x.size());
      double scale = 0.0;
      for (size_t k = 0; k < x.size(); ++k) {
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        fd[k] = (at(xp).value_tbps - at(xm).value_tbps) / (2.0 * h);
        scale = std::max(scale, std::abs(fd[k]));
      }
      for (size_t k = 0; k < x.size(); ++k)
        worst = std::max(worst, std::abs(analytic.gradient_per_dbm[k] - fd[k]) /
                                    std::max(std::abs(fd[k]), 1e-6 * scale));
    }
    checks[4].pass = worst <= 1e-4;
    checks[4].detail =
        "max gradient deviation vs central differences " + fmt(worst, 3) +
        " across both cap branches (tol 1e-4)";
    progress("check 5 done (gradient check)");
  }

  // 6. throughput arithmetic: 29 channels at 20 dB SNR
  {
    std::vector<double> snr(29, 100.0);
    double got = throughput_tbps(snr);
    double want = 2.0 * 0.148 * 29.0 * std::log2(101.0);
    checks[5].pass = rel_dev(got, want) <= 1e-9;
    checks[5].detail = fmt(got, 12) + " Tbps vs " + fmt(want, 12) +
                       " Tbps (tol 1e-9 rel)";
  }

  // Shared sweeps for checks 7, 8 and 9. A coarse but boundary-complete
  // schedule keeps the runtime CI-sized; the pass bands are wide enough that
  // the schedule pitch does not matter.
  auto schedule = default_channel_schedule(BandSet::all(), 30);
  const size_t n_sched = schedule.size();

  SweepRequest sweep_a;
  sweep_a.channel_counts = schedule;
  sweep_a.spans = {1};
  sweep_a.p_lim_dbm = {15.0, 20.0, 25.0, kInfinity};
  sweep_a.trx_snr_db = {kInfinity};
  sweep_a.base.nli = ncfg;
  SweepResult res_a = run_sweep(fibre, sweep_a);
  progress("sweep A done (1 span, ideal transceiver, " +
           std::to_string(res_a.points.size()) + " points)");

  SweepRequest sweep_b = sweep_a;
  sweep_b.spans = {6};
  sweep_b.p_lim_dbm = {15.0, 20.0};
  sweep_b.trx_snr_db = {20.0};
  SweepResult res_b = run_sweep(fibre, sweep_b);
  progress("sweep B done (6 spans, 20 dB transceiver, " +
           std::to_string(res_b.points.size()) + " points)");

  auto curve = [&](const SweepResult& r, size_t index) {
    return std::vector<SweepPoint>(
        r.points.begin() + static_cast<long>(index * n_sched),
        r.points.begin() + static_cast<long>((index + 1) * n_sched));
  };
  auto a15 = curve(res_a, 0), a20 = curve(res_a, 1), a25 = curve(res_a, 2),
       ainf = curve(res_a, 3);
  auto b15 = curve(res_b, 0), b20 = curve(res_b, 1);

  // The unconstrained full-band optimum itself, for the launch-power shape
  ChannelGrid full_grid = build_grid(390);
  OptimizerConfig full_cfg;
  full_cfg.nli = ncfg;
  auto full_opt = optimize_launch_powers(full_grid, fibre, full_cfg);
  progress("full-band unconstrained optimisation done");

  // 7. headline figures, tolerance-banded
  {
    double total_dbm = ainf.back().total_power_dbm;
    double ratio = ainf.back().throughput_tbps / a15.back().throughput_tbps;
    double sat15 = saturation_bandwidth_thz(b15, 0.9);
    double sat20 = saturation_bandwidth_thz(b20, 0.9);
    bool total_ok = total_dbm >= 28.0 && total_dbm <= 31.0;
    bool ratio_ok = ratio >= 1.58 && ratio <= 2.58;
    bool sat_ok = sat15 >= 18.0 && sat15 <= 30.0 && sat15 < sat20;
    checks[6].pass = total_ok && ratio_ok && sat_ok;
    checks[6].detail = "unconstrained total " + fmt(total_dbm) +
                       " dBm (band 28..31); unconstrained/15 dBm ratio " +
                       fmt(ratio) + " (band 1.58..2.58); 90% bandwidth " +
                       fmt(sat15) + " THz (band 18..30) < " + fmt(sat20) +
                       " THz at 20 dBm";
  }

  // 8. structural claims: the zero-dispersion hot spot, the launch-power
  //    tilt towards the short-wavelength bands, and cap ordering everywhere
  {
    std::vector<double> flat(390, 1.0);
    SolverOptions sopt;
    sopt.z_spacing_km = 0.1 / ncfg.n_m_bar;
    auto evolution = solve_span(full_grid, flat, fibre, 80.0, sopt);
    auto nli = compute_nli(full_grid, flat, fibre, evolution, 1, ncfg);
    int dip = nli_dip_index(nli, full_grid);
    double dip_nm = full_grid.wavelength_nm(dip);
    bool dip_ok = dip_nm >= 1290.0 && dip_nm <= 1330.0;

    double sum_oe = 0.0, sum_c = 0.0;
    int n_oe = 0, n_c = 0;
    for (int i = 0; i < full_grid.size(); ++i) {
      double dbm = mw_to_dbm(full_opt.launch_mw[static_cast<size_t>(i)]);
      BandId b = full_grid.at(i).band;
      if (b == BandId::O || b == BandId::E) {
        sum_oe += dbm;
        ++n_oe;
      } else if (b == BandId::C) {
        sum_c += dbm;
        ++n_c;
      }
    }
    double mean_oe = sum_oe / n_oe, mean_c = sum_c / n_c;
    bool tilt_ok = mean_oe > mean_c;

    // ordering with a whisker of slack for the outer-loop tolerance
    double worst_margin = 0.0;
    auto ordered = [&](const std::vector<SweepPoint>& lo,
                       const std::vector<SweepPoint>& hi) {
      for (size_t k = 0; k < n_sched; ++k) {
        double margin = (lo[k].throughput_tbps - hi[k].throughput_tbps) /
                        hi[k].throughput_tbps;
        worst_margin = std::max(worst_margin, margin);
      }
    };
    ordered(a15, a20);
    ordered(a20, a25);
    ordered(a25, ainf);
    bool order_ok = worst_margin <= 2e-3;

    checks[7].pass = dip_ok && tilt_ok && order_ok;
    checks[7].detail = "hot-spot channel at " + fmt(dip_nm, 6) +
                       " nm (band 1290..1330); mean launch O/E " +
                       fmt(mean_oe) + " dBm vs C " + fmt(mean_c) +
                       " dBm; worst cap-ordering violation " +
                       fmt(worst_margin, 3) + " (tol 2e-3)";
    progress("check 8 done (structure)");
  }

  // 9. remaining property pieces: monotone growth along every curve,
  //    bit-identical reruns, byte-identical artifacts
  {
    double worst_drop = 0.0;
    for (const auto* c : {&a15, &a20, &a25, &ainf, &b15, &b20})
      for (size_t k = 1; k < c->size(); ++k) {
        double drop = ((*c)[k - 1].throughput_tbps - (*c)[k].throughput_tbps) /
                      (*c)[k - 1].throughput_tbps;
        worst_drop = std::max(worst_drop, drop);
      }
    bool mono_ok = worst_drop <= 0.005;

    ChannelGrid grid29 = build_grid(29);
    OptimizerConfig cfg29;
    cfg29.nli = ncfg;
    cfg29.p_lim_dbm = 15.0;
    auto run1 = optimize_launch_powers(grid29, fibre, cfg29);
    auto run2 = optimize_launch_powers(grid29, fibre, cfg29);
    bool rerun_ok = run1.throughput_tbps == run2.throughput_tbps &&
                    run1.total_power_mw == run2.total_power_mw &&
                    run1.launch_mw == run2.launch_mw;

    namespace fs = std::filesystem;
    fs::path tmp1 = fs::temp_directory_path() / "uwdm_acceptance_rep1.csv";
    fs::path tmp2 = fs::temp_directory_path() / "uwdm_acceptance_rep2.csv";
    write_sweep_csv(tmp1.string(), res_a.points);
    write_sweep_csv(tmp2.string(), res_a.points);
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    bool bytes_ok = slurp(tmp1) == slurp(tmp2);
    fs::remove(tmp1);
    fs::remove(tmp2);

    checks[8].pass = checks[8].pass && mono_ok && rerun_ok && bytes_ok;
    checks[8].detail += "; worst throughput drop along a curve " +
                        fmt(worst_drop, 3) + " (tol 0.005); rerun " +
                        std::string(rerun_ok ? "bit-identical" : "DIFFERS") +
                        "; artifact bytes " +
                        std::string(bytes_ok ? "identical" : "DIFFER");
    progress("check 9 done (properties)");
  }

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_sweep_csv((fs::path(out_dir) / "sweep_single_span.csv").string(),
                    res_a.points);
    write_sweep_csv((fs::path(out_dir) / "sweep_six_span.csv").string(),
                    res_b.points);
    Table launch;
    launch.columns = {"channel_index", "frequency_THz", "band", "launch_dBm"};
    for (int i = 0; i < full_grid.size(); ++i)
      launch.rows.push_back(
          {std::to_string(i), format_double(full_grid.freq_thz(i)),
           band_letter(full_grid.at(i).band),
           format_double(mw_to_dbm(full_opt.launch_mw[static_cast<size_t>(i)]))});
    write_csv((fs::path(out_dir) / "launch_full_band.csv").string(), launch);
    progress("artifacts written to " + out_dir);
  }

  static const char* labels[9] = {
      "total-power cap met exactly on the constrained C-band link",
      "cap scale factor arithmetic",
      "nonlinear coefficients match the brute-force quadrature oracle",
      "span solver matches fixed-step and closed-form references",
      "analytic gradient matches finite differences on both cap branches",
      "throughput formula arithmetic",
      "headline figures inside their tolerance bands",
      "structural claims (hot spot, band tilt, cap ordering)",
      "property suite (refinement, determinism, monotone growth)",
  };
  bool all_pass = true;
  for (int i = 0; i < 9; ++i) {
    all_pass = all_pass && checks[static_cast<size_t>(i)].pass;
    std::printf("[%s] %d. %s: %s\n",
                checks[static_cast<size_t>(i)].pass ? "PASS" : "FAIL", i + 1,
                labels[i], checks[static_cast<size_t>(i)].detail.c_str());
  }
  std::printf("%s (%d/9, n_r=%d, %.1fs)\n",
              all_pass ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              static_cast<int>(std::count_if(
                  checks.begin(), checks.end(),
                  [](const Verdict& v) { return v.pass; })),
              nr, g_clock.seconds());
  return all_pass ? 0 : 1;
}
