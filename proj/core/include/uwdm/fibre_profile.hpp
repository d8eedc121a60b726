#pragma once

#include <string>
#include <utility>
#include <vector>

namespace uwdm {

// Raman gain efficiency versus pump-signal frequency separation.
// Gain values are 1/W/km, normalized to the effective area the table was
// measured at (the default table uses A_eff at 1550 nm of its parent profile).
struct RamanGainTable {
  std::vector<double> delta_f_thz;   // strictly increasing, starts at 0
  std::vector<double> gain_per_w_km;

  // Linear interpolation; zero beyond the last tabulated separation.
  double gain_at(double delta_f) const;
  void validate() const;
};

// Wavelength-resolved fibre parameters on a strictly increasing grid.
// Queries interpolate linearly; anything outside the grid is a hard error
// rather than an extrapolation.
class FibreProfile {
 public:
  struct Query {
    double alpha_db_km;      // power attenuation, dB/km
    double alpha_per_km;     // same, 1/km
    double dispersion_ps_nm_km;
    double beta2_ps2_km;
    double beta3_ps3_km;
    double aeff_um2;
    double gamma_per_w_km;   // nonlinear coefficient
  };

  FibreProfile(std::vector<double> wavelength_nm,
               std::vector<double> attenuation_db_km,
               std::vector<double> dispersion_ps_nm_km,
               std::vector<double> aeff_um2,
               std::vector<double> gamma_per_w_km,
               RamanGainTable raman);

  Query query(double wavelength_nm) const;

  double attenuation_db_km(double wavelength_nm) const;
  double attenuation_per_km(double wavelength_nm) const;
  double dispersion_ps_nm_km(double wavelength_nm) const;
  double aeff_um2(double wavelength_nm) const;
  double gamma_per_w_km(double wavelength_nm) const;
  double beta2_ps2_km(double wavelength_nm) const;
  double beta3_ps3_km(double wavelength_nm) const;

  std::pair<double, double> wavelength_range() const;
  const RamanGainTable& raman() const { return raman_; }

  // Reference effective area for Raman overlap scaling (value at 1550 nm).
  double raman_reference_aeff() const { return raman_ref_aeff_; }

  const std::vector<double>& grid_wavelengths() const { return wavelength_; }

 private:
  double interpolate(const std::vector<double>& values, double wl) const;
  double dispersion_slope(double wl) const;  // centered difference, ps/nm^2/km

  std::vector<double> wavelength_;
  std::vector<double> attenuation_db_km_;
  std::vector<double> dispersion_;
  std::vector<double> aeff_;
  std::vector<double> gamma_;
  RamanGainTable raman_;
  double raman_ref_aeff_ = 0.0;
};

// Parametric default: Rayleigh scattering fit to 0.19 dB/km at 1550 nm,
// infrared absorption edge, 1383 nm water peak, G.652-style dispersion with
// zero at 1310 nm, linear effective-area growth, triangular Raman gain with
// 0.39 1/W/km peak efficiency at 13.2 THz. Grid: 1 nm over [1250, 1690] nm.
FibreProfile make_default_profile();

// Loads a delimited text table with header
// (wavelength_nm, attenuation_dB_km, dispersion_ps_nm_km, aeff_um2, gamma_per_W_km).
// An optional second file (delta_f_THz, gain_1_per_W_km) overrides the
// default triangular Raman gain. Parse errors name the offending line.
FibreProfile load_profile(const std::string& path,
                          const std::string& raman_path = {});

}  // namespace uwdm
