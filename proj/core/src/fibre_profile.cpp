#include "uwdm/fibre_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uwdm/units.hpp"

namespace uwdm {

double RamanGainTable::gain_at(double delta_f) const {
  if (delta_f < 0.0) throw std::invalid_argument("raman gain: negative frequency separation");
  if (delta_f >= delta_f_thz.back()) return 0.0;
  auto it = std::upper_bound(delta_f_thz.begin(), delta_f_thz.end(), delta_f);
  size_t hi = static_cast<size_t>(it - delta_f_thz.begin());
  if (hi == 0) return gain_per_w_km.front();
  size_t lo = hi - 1;
  double t = (delta_f - delta_f_thz[lo]) / (delta_f_thz[hi] - delta_f_thz[lo]);
  return gain_per_w_km[lo] + t * (gain_per_w_km[hi] - gain_per_w_km[lo]);
}

void RamanGainTable::validate() const {
  if (delta_f_thz.size() != gain_per_w_km.size() || delta_f_thz.size() < 2)
    throw std::invalid_argument("raman gain: need at least two (delta_f, gain) rows");
  if (delta_f_thz.front() != 0.0)
    throw std::invalid_argument("raman gain: table must start at delta_f = 0");
  for (size_t i = 1; i < delta_f_thz.size(); ++i)
    if (delta_f_thz[i] <= delta_f_thz[i - 1])
      throw std::invalid_argument("raman gain: separations must be strictly increasing");
  for (double g : gain_per_w_km)
    if (g < 0.0) throw std::invalid_argument("raman gain: negative gain value");
}

FibreProfile::FibreProfile(std::vector<double> wavelength_nm,
                           std::vector<double> attenuation_db_km,
                           std::vector<double> dispersion_ps_nm_km,
                           std::vector<double> aeff_um2,
                           std::vector<double> gamma_per_w_km,
                           RamanGainTable raman)
    : wavelength_(std::move(wavelength_nm)),
      attenuation_db_km_(std::move(attenuation_db_km)),
      dispersion_(std::move(dispersion_ps_nm_km)),
      aeff_(std::move(aeff_um2)),
      gamma_(std::move(gamma_per_w_km)),
      raman_(std::move(raman)) {
  size_t n = wavelength_.size();
  if (n < 2) throw std::invalid_argument("fibre profile: need at least two grid rows");
  if (attenuation_db_km_.size() != n || dispersion_.size() != n ||
      aeff_.size() != n || gamma_.size() != n)
    throw std::invalid_argument("fibre profile: column lengths differ");
  for (size_t i = 1; i < n; ++i)
    if (wavelength_[i] <= wavelength_[i - 1])
      throw std::invalid_argument("fibre profile: wavelength grid not strictly increasing at row " +
                                  std::to_string(i + 1));
  for (size_t i = 0; i < n; ++i) {
    if (attenuation_db_km_[i] <= 0.0)
      throw std::invalid_argument("fibre profile: non-positive attenuation at row " +
                                  std::to_string(i + 1));
    if (aeff_[i] <= 0.0)
      throw std::invalid_argument("fibre profile: non-positive effective area at row " +
                                  std::to_string(i + 1));
    if (gamma_[i] <= 0.0)
      throw std::invalid_argument("fibre profile: non-positive gamma at row " +
                                  std::to_string(i + 1));
  }
  raman_.validate();
  // Overlap scaling for Raman interactions references A_eff at 1550 nm when
  // the grid covers it, else the midpoint of the grid.
  double ref_wl = 1550.0;
  if (ref_wl < wavelength_.front() || ref_wl > wavelength_.back())
    ref_wl = 0.5 * (wavelength_.front() + wavelength_.back());
  raman_ref_aeff_ = interpolate(aeff_, ref_wl);
}

double FibreProfile::interpolate(const std::vector<double>& values, double wl) const {
  if (wl < wavelength_.front() || wl > wavelength_.back())
    throw std::out_of_range("fibre profile: wavelength " + std::to_string(wl) +
                            " nm outside grid [" + std::to_string(wavelength_.front()) +
                            ", " + std::to_string(wavelength_.back()) + "]");
  auto it = std::upper_bound(wavelength_.begin(), wavelength_.end(), wl);
  if (it == wavelength_.end()) return values.back();
  size_t hi = static_cast<size_t>(it - wavelength_.begin());
  if (hi == 0) return values.front();
  size_t lo = hi - 1;
  double t = (wl - wavelength_[lo]) / (wavelength_[hi] - wavelength_[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

double FibreProfile::dispersion_slope(double wl) const {
  // Centered difference with a step tied to the grid pitch near wl.
  double h = (wavelength_.back() - wavelength_.front()) /
             static_cast<double>(wavelength_.size() - 1);
  double lo = wl - h, hi = wl + h;
  if (lo < wavelength_.front()) { lo = wavelength_.front(); }
  if (hi > wavelength_.back()) { hi = wavelength_.back(); }
  return (interpolate(dispersion_, hi) - interpolate(dispersion_, lo)) / (hi - lo);
}

double FibreProfile::attenuation_db_km(double wl) const { return interpolate(attenuation_db_km_, wl); }
double FibreProfile::attenuation_per_km(double wl) const {
  return attenuation_db_to_linear(attenuation_db_km(wl));
}
double FibreProfile::dispersion_ps_nm_km(double wl) const { return interpolate(dispersion_, wl); }
double FibreProfile::aeff_um2(double wl) const { return interpolate(aeff_, wl); }
double FibreProfile::gamma_per_w_km(double wl) const { return interpolate(gamma_, wl); }

double FibreProfile::beta2_ps2_km(double wl) const {
  // beta2 = -D * lambda^2 / (2 pi c); with lambda in nm, c in nm*THz and D in
  // ps/nm/km this comes out directly in ps^2/km.
  return -dispersion_ps_nm_km(wl) * wl * wl / (2.0 * M_PI * constants::kSpeedOfLight);
}

double FibreProfile::beta3_ps3_km(double wl) const {
  // beta3 = (lambda^3 / (2 pi c)^2) * (lambda * dD/dlambda + 2 D), ps^3/km.
  double two_pi_c = 2.0 * M_PI * constants::kSpeedOfLight;
  double d = dispersion_ps_nm_km(wl);
  double slope = dispersion_slope(wl);
  return wl * wl * wl / (two_pi_c * two_pi_c) * (wl * slope + 2.0 * d);
}

FibreProfile::Query FibreProfile::query(double wl) const {
  Query q;
  q.alpha_db_km = attenuation_db_km(wl);
  q.alpha_per_km = attenuation_db_to_linear(q.alpha_db_km);
  q.dispersion_ps_nm_km = dispersion_ps_nm_km(wl);
  q.beta2_ps2_km = beta2_ps2_km(wl);
  q.beta3_ps3_km = beta3_ps3_km(wl);
  q.aeff_um2 = aeff_um2(wl);
  q.gamma_per_w_km = gamma_per_w_km(wl);
  return q;
}

std::pair<double, double> FibreProfile::wavelength_range() const {
  return {wavelength_.front(), wavelength_.back()};
}

namespace {

double default_attenuation_db_km(double wl) {
  // Rayleigh A/lambda^4 pinned to 0.19 dB/km at 1550 nm, infrared absorption
  // edge, and a Gaussian OH peak at 1383 nm (0.1 dB/km, 15 nm width).
  double rayleigh = 0.19 * std::pow(1550.0 / wl, 4);
  double infrared = 7.81e11 * std::exp(-48.48 / (wl * 1e-3));
  double dw = (wl - 1383.0) / 15.0;
  double water = 0.1 * std::exp(-0.5 * dw * dw);
  return rayleigh + infrared + water;
}

double default_dispersion_ps_nm_km(double wl) {
  // Standard single-mode form, zero-dispersion at 1310 nm, slope 0.092.
  constexpr double s0 = 0.092;       // ps/nm^2/km
  constexpr double lambda0 = 1310.0; // nm
  double l0_4 = lambda0 * lambda0 * lambda0 * lambda0;
  return s0 / 4.0 * (wl - l0_4 / (wl * wl * wl));
}

double default_aeff_um2(double wl) {
  // Linear growth from 65 um^2 at 1260 nm to 95 um^2 at 1675 nm.
  return 65.0 + 30.0 * (wl - 1260.0) / (1675.0 - 1260.0);
}

double default_gamma_per_w_km(double wl, double aeff_um2) {
  constexpr double n2 = 2.6e-20;  // m^2/W
  double lambda_m = wl * 1e-9;
  double aeff_m2 = aeff_um2 * 1e-12;
  return 2.0 * M_PI * n2 / (lambda_m * aeff_m2) * 1e3;  // 1/W/m -> 1/W/km
}

RamanGainTable default_raman_table() {
  // Triangular profile: linear rise to the 0.39 1/W/km peak at 13.2 THz,
  // linear fall to zero at 15 THz, zero beyond.
  RamanGainTable t;
  for (int i = 0; i <= 400; ++i) {
    double df = 0.1 * i;
    double g = 0.0;
    if (df <= 13.2) g = 0.39 * df / 13.2;
    else if (df < 15.0) g = 0.39 * (15.0 - df) / 1.8;
    t.delta_f_thz.push_back(df);
    t.gain_per_w_km.push_back(g);
  }
  return t;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == ';' || c == '\r') {
      if (!cur.empty()) { out.push_back(cur); cur.clear(); }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& field, const std::string& path, size_t line_no) {
  try {
    size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                ": cannot parse '" + field + "' as a number");
  }
}

}  // namespace

FibreProfile make_default_profile() {
  std::vector<double> wl, att, disp, aeff, gamma;
  for (int nm = 1250; nm <= 1690; ++nm) {
    double w = static_cast<double>(nm);
    double a = default_aeff_um2(w);
    wl.push_back(w);
    att.push_back(default_attenuation_db_km(w));
    disp.push_back(default_dispersion_ps_nm_km(w));
    aeff.push_back(a);
    gamma.push_back(default_gamma_per_w_km(w, a));
  }
  return FibreProfile(std::move(wl), std::move(att), std::move(disp),
                      std::move(aeff), std::move(gamma), default_raman_table());
}

FibreProfile load_profile(const std::string& path, const std::string& raman_path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("fibre profile: cannot open " + path);

  std::vector<double> wl, att, disp, aeff, gamma;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (!header_seen) {
      // Header row: first field must name the wavelength column.
      if (fields[0] != "wavelength_nm")
        throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                    ": expected header starting with wavelength_nm");
      if (fields.size() < 5)
        throw std::invalid_argument(path + ": header needs 5 columns");
      header_seen = true;
      continue;
    }
    if (fields.size() != 5)
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 5 fields, got " + std::to_string(fields.size()));
    wl.push_back(parse_number(fields[0], path, line_no));
    att.push_back(parse_number(fields[1], path, line_no));
    disp.push_back(parse_number(fields[2], path, line_no));
    aeff.push_back(parse_number(fields[3], path, line_no));
    gamma.push_back(parse_number(fields[4], path, line_no));
  }
  if (!header_seen) throw std::invalid_argument(path + ": missing header row");

  RamanGainTable raman;
  if (raman_path.empty()) {
    raman = default_raman_table();
  } else {
    std::ifstream rin(raman_path);
    if (!rin) throw std::invalid_argument("raman gain: cannot open " + raman_path);
    std::string rline;
    size_t rline_no = 0;
    bool rheader = false;
    while (std::getline(rin, rline)) {
      ++rline_no;
      if (rline.empty() || rline[0] == '#') continue;
      auto fields = split_fields(rline);
      if (fields.empty()) continue;
      if (!rheader) {
        if (fields[0] != "delta_f_THz")
          throw std::invalid_argument(raman_path + ": line " + std::to_string(rline_no) +
                                      ": expected header starting with delta_f_THz");
        rheader = true;
        continue;
      }
      if (fields.size() != 2)
        throw std::invalid_argument(raman_path + ": line " + std::to_string(rline_no) +
                                    ": expected 2 fields");
      raman.delta_f_thz.push_back(parse_number(fields[0], raman_path, rline_no));
      raman.gain_per_w_km.push_back(parse_number(fields[1], raman_path, rline_no));
    }
  }
  return FibreProfile(std::move(wl), std::move(att), std::move(disp),
                      std::move(aeff), std::move(gamma), std::move(raman));
}

}  // namespace uwdm
