// Command line front end: single optimised runs and bandwidth-expansion
// sweeps, with CSV artifacts and optional SVG charts. Every data file embeds
// the resolved configuration as a comment preamble so a result can be traced
// back to its inputs; identical configurations produce byte-identical files.
//
// Exit codes: 0 success, 1 invalid configuration or arguments,
// 2 finished but not converged, 3 internal failure.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"
#include "uwdm/plot_svg.hpp"
#include "uwdm/power_optimizer.hpp"
#include "uwdm/run_config.hpp"
#include "uwdm/scenario_sweep.hpp"
#include "uwdm/table_io.hpp"
#include "uwdm/units.hpp"

using namespace uwdm;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInternal = 3;

constexpr const char* kArtifactVersion = "uwdm artifact v1";

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

// Comment preamble for every artifact: the fully resolved model
// configuration (worker counts are an execution detail and stay out so the
// files keep their byte identity across machines).
std::vector<std::string> config_header(const RunConfig& cfg, bool sweep_mode) {
  std::vector<std::string> lines = {
      kArtifactVersion,
      "bands = " + cfg.bands,
      "channels = " +
          (cfg.channels < 0 ? std::string("all") : std::to_string(cfg.channels)),
      "spans = " + std::to_string(cfg.spans),
      "span_km = " + format_double(cfg.span_km),
      "p_lim_dbm = " + format_db(cfg.p_lim_dbm),
      "trx_snr_db = " + format_db(cfg.trx_snr_db),
      "fibre = " + (cfg.fibre_path.empty() ? std::string("default")
                                           : cfg.fibre_path),
      "raman = " + (cfg.raman_path.empty() ? std::string("default")
                                           : cfg.raman_path),
      "n_r = " + std::to_string(cfg.n_r),
      "n_m_bar = " + format_double(cfg.n_m_bar),
      "seg_mode = " + cfg.seg_mode,
      "init_dbm = " + format_double(cfg.init_dbm),
      "lower_dbm = " + format_double(cfg.lower_dbm),
      "upper_dbm = " + format_double(cfg.upper_dbm),
      "max_outer = " + std::to_string(cfg.max_outer),
  };
  if (sweep_mode) {
    lines.push_back("sweep_spans = " + join_ints(cfg.sweep_spans));
    lines.push_back("sweep_p_lim_dbm = " + join_doubles(cfg.sweep_p_lim_dbm));
    lines.push_back("sweep_trx_snr_db = " + join_doubles(cfg.sweep_trx_snr_db));
    lines.push_back("sweep_step = " + std::to_string(cfg.sweep_step));
  }
  return lines;
}

OptimizerConfig optimizer_config(const RunConfig& cfg, int workers) {
  OptimizerConfig opt;
  opt.segment_mode =
      cfg.seg_mode == "formula" ? SegmentMode::kFormula : SegmentMode::kTable1;
  opt.p_lim_dbm = cfg.p_lim_dbm;
  opt.trx_snr_db = cfg.trx_snr_db;
  opt.n_spans = cfg.spans;
  opt.span_km = cfg.span_km;
  opt.nli.n_r = cfg.n_r;
  opt.nli.n_m_bar = cfg.n_m_bar;
  opt.nli.threads = workers > 0 ? workers : cfg.threads;
  opt.init_dbm = cfg.init_dbm;
  opt.lower_dbm = cfg.lower_dbm;
  opt.upper_dbm = cfg.upper_dbm;
  opt.max_outer_iterations = cfg.max_outer;
  return opt;
}

FibreProfile resolve_fibre(const RunConfig& cfg) {
  if (cfg.fibre_path.empty() || cfg.fibre_path == "default") {
    if (!cfg.raman_path.empty())
      throw std::invalid_argument(
          "a raman override needs an explicit fibre profile");
    return make_default_profile();
  }
  if (!fs::exists(cfg.fibre_path))
    throw std::invalid_argument("profile not found: " + cfg.fibre_path);
  if (!cfg.raman_path.empty() && !fs::exists(cfg.raman_path))
    throw std::invalid_argument("raman table not found: " + cfg.raman_path);
  return load_profile(cfg.fibre_path, cfg.raman_path);
}

fs::path resolve_out_dir(const std::string& flag_out, const RunConfig& cfg) {
  if (!flag_out.empty()) return flag_out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv("UWDM_OUT_ROOT");
  return fs::path(root ? root : ".") / "uwdm_out";
}

// One series per populated band keeps the chart legend aligned with the
// spectrum layout.
std::vector<PlotSeries> per_band_series(const ChannelGrid& grid,
                                        const std::vector<double>& y) {
  std::vector<PlotSeries> series;
  for (const auto& info : band_table()) {
    PlotSeries s;
    s.label = band_letter(info.id);
    for (int i = 0; i < grid.size(); ++i) {
      if (grid.at(i).band != info.id) continue;
      s.x.push_back(grid.freq_thz(i));
      s.y.push_back(y[static_cast<size_t>(i)]);
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  return series;
}

int run_single(const RunConfig& cfg, const fs::path& out, int workers,
               bool dump_rho) {
  FibreProfile fibre = resolve_fibre(cfg);
  BandSet bands = BandSet::parse(cfg.bands);
  int n = cfg.channels < 0 ? bands.capacity() : cfg.channels;
  ChannelGrid grid = build_grid(n, bands);
  OptimizerConfig opt = optimizer_config(cfg, workers);

  auto result = optimize_launch_powers(grid, fibre, opt);

  fs::create_directories(out);
  auto header = config_header(cfg, false);

  Table grid_table;
  grid_table.columns = {"channel_index", "frequency_THz", "wavelength_nm",
                        "band", "added_step", "noise_figure_dB"};
  for (int i = 0; i < grid.size(); ++i)
    grid_table.rows.push_back({std::to_string(i),
                               format_double(grid.freq_thz(i)),
                               format_double(grid.wavelength_nm(i)),
                               band_letter(grid.at(i).band),
                               std::to_string(grid.at(i).added_step),
                               format_double(grid.noise_figure_db(i))});
  write_csv((out / "grid.csv").string(), grid_table, header);

  Table launch;
  launch.columns = {"channel_index", "frequency_THz", "band", "launch_dBm",
                    "launch_mW"};
  std::vector<double> launch_dbm(result.launch_mw.size());
  for (int i = 0; i < grid.size(); ++i) {
    size_t k = static_cast<size_t>(i);
    launch_dbm[k] = mw_to_dbm(result.launch_mw[k]);
    launch.rows.push_back({std::to_string(i), format_double(grid.freq_thz(i)),
                           band_letter(grid.at(i).band),
                           format_double(launch_dbm[k]),
                           format_double(result.launch_mw[k])});
  }
  write_csv((out / "launch_power.csv").string(), launch, header);

  Table snr;
  snr.columns = {"channel_index", "frequency_THz", "band",     "snr_dB",
                 "p_ase_mW",      "p_nli_mW",      "eta_per_mW2"};
  std::vector<double> snr_db(result.snr.size());
  for (int i = 0; i < grid.size(); ++i) {
    size_t k = static_cast<size_t>(i);
    double q = result.launch_mw[k];
    snr_db[k] = linear_to_db(result.snr[k]);
    snr.rows.push_back({std::to_string(i), format_double(grid.freq_thz(i)),
                        band_letter(grid.at(i).band), format_double(snr_db[k]),
                        format_double(result.ase_mw[k]),
                        format_double(result.eta_per_mw2[k] * q * q * q),
                        format_double(result.eta_per_mw2[k])});
  }
  write_csv((out / "snr.csv").string(), snr, header);

  Table summary;
  summary.columns = {"n_channels",      "bandwidth_THz",   "spans",
                     "p_lim_dBm",       "trx_snr_dB",      "throughput_Tbps",
                     "total_power_dBm", "tau",             "converged",
                     "outer_iterations", "inner_iterations"};
  summary.rows.push_back(
      {std::to_string(grid.size()),
       format_double(occupied_bandwidth_thz(grid)), std::to_string(cfg.spans),
       format_db(cfg.p_lim_dbm), format_db(cfg.trx_snr_db),
       format_double(result.throughput_tbps),
       format_double(mw_to_dbm(result.total_power_mw)),
       format_double(result.tau), result.converged ? "1" : "0",
       std::to_string(result.outer_iterations),
       std::to_string(result.inner_iterations_total)});
  write_csv((out / "summary.csv").string(), summary, header);

  if (dump_rho) {
    SolverOptions sopt;
    sopt.z_spacing_km = 0.1 / cfg.n_m_bar;
    auto ev = solve_span(grid, result.launch_mw, fibre, cfg.span_km, sopt);
    Table rho;
    rho.columns = {"z_km"};
    for (int i = 0; i < grid.size(); ++i)
      rho.columns.push_back("rho_ch" + std::to_string(i));
    for (int iz = 0; iz < ev.n_z(); ++iz) {
      std::vector<std::string> row = {
          format_double(ev.z_km[static_cast<size_t>(iz)])};
      for (int i = 0; i < grid.size(); ++i)
        row.push_back(format_double(ev.rho_at(iz, i)));
      rho.rows.push_back(std::move(row));
    }
    write_csv((out / "rho.csv").string(), rho, header);
  }

  if (cfg.plots) {
    try {
      write_line_chart_svg((out / "launch_power.svg").string(),
                           "optimised launch power", "frequency [THz]",
                           "launch power [dBm]",
                           per_band_series(grid, launch_dbm));
      write_line_chart_svg((out / "snr.svg").string(), "received SNR",
                           "frequency [THz]", "SNR [dB]",
                           per_band_series(grid, snr_db));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: plot generation failed: %s\n", e.what());
    }
  }

  std::printf("channels %d (%s), occupied bandwidth %s THz\n", grid.size(),
              grid.bands().to_string().c_str(),
              format_double(occupied_bandwidth_thz(grid)).c_str());
  std::printf("throughput %s Tbps, total power %s dBm, tau %s\n",
              format_double(result.throughput_tbps).c_str(),
              format_double(mw_to_dbm(result.total_power_mw)).c_str(),
              format_double(result.tau).c_str());
  std::printf("converged %s (%d outer, %d inner iterations)\n",
              result.converged ? "yes" : "NO", result.outer_iterations,
              result.inner_iterations_total);
  std::printf("artifacts in %s\n", out.string().c_str());
  if (!result.converged)
    std::fprintf(stderr,
                 "warning: optimiser did not converge, results are best-so-far\n");
  return result.converged ? kExitOk : kExitNotConverged;
}

int run_sweep_mode(const RunConfig& cfg, const fs::path& out, int workers) {
  FibreProfile fibre = resolve_fibre(cfg);

  SweepRequest request;
  request.bands = BandSet::parse(cfg.bands);
  request.channel_counts =
      default_channel_schedule(request.bands, cfg.sweep_step);
  request.spans = cfg.sweep_spans;
  request.p_lim_dbm = cfg.sweep_p_lim_dbm;
  request.trx_snr_db = cfg.sweep_trx_snr_db;
  request.base = optimizer_config(cfg, workers);

  fs::create_directories(out);
  fs::path results_path = out / "sweep_results.csv";
  std::vector<SweepPoint> cached;
  if (fs::exists(results_path)) {
    try {
      cached = read_sweep_csv(results_path.string());
    } catch (const std::runtime_error& e) {
      throw std::invalid_argument(std::string(e.what()) +
                                  " (move it aside or pick another --out)");
    }
  }

  int curve_workers = workers > 0 ? workers : 1;
  SweepResult result = run_sweep(fibre, request, cached, curve_workers);
  std::printf("sweep points: %d computed, %d reused\n", result.computed,
              result.skipped);

  auto header = config_header(cfg, true);
  if (result.computed > 0)
    write_sweep_csv(results_path.string(), result.points, header);
  else
    std::printf("no new points, %s left untouched\n",
                results_path.string().c_str());

  // per-curve saturation summary, curves in axis order
  const size_t n_counts = request.channel_counts.size();
  Table sat;
  sat.columns = {"spans",
                 "p_lim_dBm",
                 "trx_snr_dB",
                 "saturation_bandwidth_THz",
                 "full_bandwidth_THz",
                 "full_throughput_Tbps"};
  std::vector<PlotSeries> curves_plot;
  size_t curve_index = 0;
  bool all_converged = true;
  for (int spans : request.spans)
    for (double p_lim : request.p_lim_dbm)
      for (double trx : request.trx_snr_db) {
        auto first = result.points.begin() +
                     static_cast<long>(curve_index * n_counts);
        std::vector<SweepPoint> curve(first, first + static_cast<long>(n_counts));
        ++curve_index;
        for (const auto& p : curve) all_converged = all_converged && p.converged;
        double sat_bw = saturation_bandwidth_thz(curve, 0.9);
        sat.rows.push_back({std::to_string(spans), format_db(p_lim),
                            format_db(trx), format_double(sat_bw),
                            format_double(curve.back().bandwidth_thz),
                            format_double(curve.back().throughput_tbps)});
        std::printf(
            "spans %d, cap %s dBm, trx %s dB: 90%% of peak at %s THz, full-band"
            " %s Tbps\n",
            spans, format_db(p_lim).c_str(), format_db(trx).c_str(),
            format_double(sat_bw).c_str(),
            format_double(curve.back().throughput_tbps).c_str());

        PlotSeries s;
        s.label = "spans " + std::to_string(spans) + ", cap " +
                  format_db(p_lim) + " dBm, trx " + format_db(trx) + " dB";
        for (const auto& p : curve) {
          s.x.push_back(p.bandwidth_thz);
          s.y.push_back(p.throughput_tbps);
        }
        curves_plot.push_back(std::move(s));
      }
  write_csv((out / "saturation.csv").string(), sat, header);

  if (cfg.plots) {
    try {
      write_line_chart_svg((out / "sweep_throughput.svg").string(),
                           "throughput vs occupied bandwidth",
                           "occupied bandwidth [THz]", "throughput [Tbps]",
                           curves_plot);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: plot generation failed: %s\n", e.what());
    }
  }

  std::printf("artifacts in %s\n", out.string().c_str());
  if (!all_converged)
    std::fprintf(stderr, "warning: some sweep points did not converge\n");
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "uwdm: ultrawideband link throughput simulator and launch-power "
      "optimiser"};

  std::string config_path, fibre_path, raman_path, bands, channels_str;
  std::string plim_str, trx_str, seg_mode, accuracy_str, out_flag;
  int spans = 0, workers = 0, step = 0;
  bool sweep_mode = false, dump_rho = false, no_plots = false;

  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--fibre", fibre_path,
                 "fibre profile table ('default' = built-in)");
  app.add_option("--raman", raman_path, "Raman gain override table");
  app.add_option("--bands", bands, "band letters, e.g. OESCLU or CL");
  app.add_option("--channels", channels_str,
                 "channel count, or 'full'/'all' for every slot");
  app.add_option("--spans", spans, "number of spans")->check(CLI::Range(1, 1000));
  app.add_option("--plim-dbm", plim_str, "total power cap in dBm, or 'inf'");
  app.add_option("--trx-snr-db", trx_str,
                 "transceiver back-to-back SNR in dB, or 'ideal'");
  app.add_option("--seg-mode", seg_mode, "segment layout: table1 or formula")
      ->check(CLI::IsMember({"table1", "formula"}));
  app.add_option("--accuracy", accuracy_str,
                 "quadrature resolution: n_r or n_r,n_m_bar");
  app.add_option("--workers", workers, "worker threads")
      ->check(CLI::Range(0, 4096));
  app.add_option("--out", out_flag,
                 "output directory (default: $UWDM_OUT_ROOT/uwdm_out)");
  app.add_option("--step", step, "sweep schedule pitch in channels")
      ->check(CLI::Range(1, 390));
  app.add_flag("--sweep", sweep_mode, "run the bandwidth-expansion sweep");
  app.add_flag("--dump-rho", dump_rho,
               "also write the span power evolution (single run)");
  app.add_flag("--no-plots", no_plots, "skip SVG chart generation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  RunConfig cfg;
  fs::path out;
  try {
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (app.count("--fibre")) cfg.fibre_path = fibre_path;
    if (app.count("--raman")) cfg.raman_path = raman_path;
    if (app.count("--bands")) cfg.bands = bands;
    if (app.count("--channels")) {
      if (channels_str == "full" || channels_str == "all") {
        cfg.channels = -1;
      } else {
        size_t used = 0;
        cfg.channels = std::stoi(channels_str, &used);
        if (used != channels_str.size())
          throw std::invalid_argument("bad --channels value: " + channels_str);
      }
    }
    if (app.count("--spans")) cfg.spans = spans;
    if (app.count("--plim-dbm")) cfg.p_lim_dbm = parse_double(plim_str);
    if (app.count("--trx-snr-db"))
      cfg.trx_snr_db = trx_str == "ideal" ? kInfinity : parse_double(trx_str);
    if (app.count("--seg-mode")) cfg.seg_mode = seg_mode;
    if (app.count("--accuracy")) {
      std::string head = accuracy_str, tail;
      if (auto comma = accuracy_str.find(','); comma != std::string::npos) {
        head = accuracy_str.substr(0, comma);
        tail = accuracy_str.substr(comma + 1);
      }
      size_t used = 0;
      cfg.n_r = std::stoi(head, &used);
      if (used != head.size() || cfg.n_r < 4)
        throw std::invalid_argument("bad --accuracy value: " + accuracy_str);
      if (!tail.empty()) {
        cfg.n_m_bar = parse_double(tail);
        if (!(cfg.n_m_bar > 0))
          throw std::invalid_argument("bad --accuracy value: " + accuracy_str);
      }
    }
    if (app.count("--step")) cfg.sweep_step = step;
    if (no_plots) cfg.plots = false;
    if (dump_rho) cfg.dump_rho = true;

    // single-value axis overrides for sweep mode
    if (sweep_mode) {
      if (app.count("--spans")) cfg.sweep_spans = {cfg.spans};
      if (app.count("--plim-dbm")) cfg.sweep_p_lim_dbm = {cfg.p_lim_dbm};
      if (app.count("--trx-snr-db")) cfg.sweep_trx_snr_db = {cfg.trx_snr_db};
    }

    out = resolve_out_dir(out_flag, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }

  try {
    return sweep_mode ? run_sweep_mode(cfg, out, workers)
                      : run_single(cfg, out, workers, cfg.dump_rho);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
