#pragma once

#include <string>
#include <vector>

#include "uwdm/units.hpp"

namespace uwdm {

// Everything a run needs, as read from an INI-style config file. Command
// line flags override individual fields after loading.
struct RunConfig {
  // [grid]
  std::string bands = "OESCLU";
  int channels = -1;  // -1 = every channel the selected bands hold

  // [link]
  int spans = 1;
  double span_km = 80.0;
  double p_lim_dbm = kInfinity;
  double trx_snr_db = kInfinity;

  // [fibre]
  std::string fibre_path;  // key "profile"; empty = built-in default
  std::string raman_path;  // key "raman"

  // [nli]
  int n_r = 150;
  double n_m_bar = 1.4;
  int threads = 0;

  // [optimizer]
  std::string seg_mode = "table1";  // or "formula"
  double init_dbm = 0.0;
  double lower_dbm = -30.0;
  double upper_dbm = 10.0;
  int max_outer = 10;

  // [output]
  std::string out_dir;  // key "dir"
  bool dump_rho = false;
  bool plots = true;

  // [sweep]  (keys "spans", "p_lim_dbm", "trx_snr_db", "step"; lists are
  // comma separated)
  std::vector<int> sweep_spans{1, 6};
  std::vector<double> sweep_p_lim_dbm{15.0, 20.0, 25.0,
                                      kInfinity};
  std::vector<double> sweep_trx_snr_db{kInfinity, 20.0};
  int sweep_step = 10;
};

// Parses the INI file: [section] headers, key = value lines, '#' or ';'
// comments. Unknown sections or keys are errors, as are malformed values.
RunConfig load_run_config(const std::string& path);

}  // namespace uwdm
