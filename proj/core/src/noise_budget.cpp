#include "uwdm/noise_budget.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uwdm/units.hpp"

namespace uwdm {

std::vector<double> ase_power_mw(const ChannelGrid& grid,
                                 const std::vector<double>& amp_gain_linear,
                                 int n_spans) {
  const size_t n = grid.size();
  if (amp_gain_linear.size() != n)
    throw std::invalid_argument("ase_power_mw: gain vector has " +
                                std::to_string(amp_gain_linear.size()) +
                                " entries for " + std::to_string(n) +
                                " channels");
  if (n_spans < 1)
    throw std::invalid_argument("ase_power_mw: span count must be positive");

  std::vector<double> ase(n);
  for (size_t i = 0; i < n; ++i) {
    double g = amp_gain_linear[i];
    if (!std::isfinite(g) || g < 1.0)
      throw std::invalid_argument("ase_power_mw: amplifier gain for channel " +
                                  std::to_string(i) +
                                  " is below unity; the amplifier only adds "
                                  "noise when it amplifies");
    double nf = db_to_linear(grid.noise_figure_db(i));
    double f_hz = grid.channels()[i].freq_thz * 1e12;
    double bw_hz = ChannelGrid::kSymbolRateTHz * 1e12;
    double watts = n_spans * constants::kPlanck * f_hz * (nf * g - 1.0) * bw_hz;
    ase[i] = watts * 1e3;
  }
  return ase;
}

std::vector<double> snr_linear(const std::vector<double>& powers_mw,
                               const std::vector<double>& eta_per_mw2,
                               const std::vector<double>& ase_mw,
                               double trx_snr_linear) {
  const size_t n = powers_mw.size();
  if (eta_per_mw2.size() != n || ase_mw.size() != n)
    throw std::invalid_argument("snr_linear: input vectors differ in length");
  if (!(trx_snr_linear > 0.0))
    throw std::invalid_argument("snr_linear: transceiver SNR must be positive");

  double inv_trx = std::isinf(trx_snr_linear) ? 0.0 : 1.0 / trx_snr_linear;
  std::vector<double> snr(n);
  for (size_t i = 0; i < n; ++i) {
    double p = powers_mw[i];
    double noise = eta_per_mw2[i] * p * p * p + ase_mw[i] + p * inv_trx;
    snr[i] = noise > 0.0 ? p / noise
                         : (p > 0.0 ? kInfinity : 0.0);
  }
  return snr;
}

double throughput_tbps(const std::vector<double>& snr) {
  double sum = 0.0;
  for (double s : snr) {
    if (!(s >= 0.0))
      throw std::invalid_argument("throughput_tbps: SNR must be non-negative");
    sum += std::log2(1.0 + s);
  }
  return 2.0 * ChannelGrid::kSymbolRateTHz * sum;
}

}  // namespace uwdm
