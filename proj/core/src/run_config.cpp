#include "uwdm/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uwdm/table_io.hpp"

namespace uwdm {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& path, size_t line,
                       const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

int to_int(const std::string& v, const std::string& path, size_t line) {
  try {
    size_t used = 0;
    int r = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    fail(path, line, "expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& path, size_t line) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    fail(path, line, "expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& path, size_t line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(path, line, "expected a boolean, got '" + v + "'");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_run_config: cannot open '" + path + "'");

  RunConfig cfg;
  std::string section;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(path, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"grid", "link",      "fibre", "nli",
                                    "optimizer", "output", "sweep"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
            return section == k;
          }) == std::end(known))
        fail(path, line_no, "unknown section [" + section + "]");
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(path, line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) fail(path, line_no, "empty key or value");

    auto unknown_key = [&]() {
      fail(path, line_no, "unknown key '" + key + "' in [" + section + "]");
    };

    if (section == "grid") {
      if (key == "bands") cfg.bands = val;
      else if (key == "channels")
        cfg.channels = val == "all" ? -1 : to_int(val, path, line_no);
      else unknown_key();
    } else if (section == "link") {
      if (key == "spans") cfg.spans = to_int(val, path, line_no);
      else if (key == "span_km") cfg.span_km = to_double(val, path, line_no);
      else if (key == "p_lim_dbm") cfg.p_lim_dbm = to_double(val, path, line_no);
      else if (key == "trx_snr_db")
        cfg.trx_snr_db = to_double(val, path, line_no);
      else unknown_key();
    } else if (section == "fibre") {
      if (key == "profile") cfg.fibre_path = val;
      else if (key == "raman") cfg.raman_path = val;
      else unknown_key();
    } else if (section == "nli") {
      if (key == "n_r") cfg.n_r = to_int(val, path, line_no);
      else if (key == "n_m_bar") cfg.n_m_bar = to_double(val, path, line_no);
      else if (key == "threads") cfg.threads = to_int(val, path, line_no);
      else unknown_key();
    } else if (section == "optimizer") {
      if (key == "seg_mode") {
        if (val != "table1" && val != "formula")
          fail(path, line_no, "seg_mode must be 'table1' or 'formula'");
        cfg.seg_mode = val;
      } else if (key == "init_dbm")
        cfg.init_dbm = to_double(val, path, line_no);
      else if (key == "lower_dbm") cfg.lower_dbm = to_double(val, path, line_no);
      else if (key == "upper_dbm") cfg.upper_dbm = to_double(val, path, line_no);
      else if (key == "max_outer") cfg.max_outer = to_int(val, path, line_no);
      else unknown_key();
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "dump_rho") cfg.dump_rho = to_bool(val, path, line_no);
      else if (key == "plots") cfg.plots = to_bool(val, path, line_no);
      else unknown_key();
    } else if (section == "sweep") {
      if (key == "spans") {
        cfg.sweep_spans.clear();
        for (const auto& v : split_list(val))
          cfg.sweep_spans.push_back(to_int(v, path, line_no));
      } else if (key == "p_lim_dbm") {
        cfg.sweep_p_lim_dbm.clear();
        for (const auto& v : split_list(val))
          cfg.sweep_p_lim_dbm.push_back(to_double(v, path, line_no));
      } else if (key == "trx_snr_db") {
        cfg.sweep_trx_snr_db.clear();
        for (const auto& v : split_list(val))
          cfg.sweep_trx_snr_db.push_back(to_double(v, path, line_no));
      } else if (key == "step") {
        cfg.sweep_step = to_int(val, path, line_no);
      } else {
        unknown_key();
      }
    } else {
      fail(path, line_no, "key '" + key + "' appears before any section");
    }
  }
  return cfg;
}

}  // namespace uwdm
