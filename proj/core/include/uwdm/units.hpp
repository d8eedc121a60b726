#pragma once

#include <cmath>
#include <limits>

namespace uwdm {

namespace constants {

// Speed of light expressed in nm*THz so that lambda[nm] * f[THz] = c holds
// without conversion factors anywhere in the code base.
inline constexpr double kSpeedOfLight = 299792.458;

// Planck constant, J*s (exact SI value).
inline constexpr double kPlanck = 6.62607015e-34;

inline constexpr double kLn10 = 2.302585092994045684;

}  // namespace constants

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double wavelength_to_freq_thz(double wavelength_nm) {
  return constants::kSpeedOfLight / wavelength_nm;
}

inline double freq_to_wavelength_nm(double freq_thz) {
  return constants::kSpeedOfLight / freq_thz;
}

// Power attenuation: dB/km -> 1/km.
inline double attenuation_db_to_linear(double alpha_db_km) {
  return alpha_db_km * constants::kLn10 / 10.0;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace uwdm
