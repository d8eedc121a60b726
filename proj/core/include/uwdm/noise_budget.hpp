#pragma once

#include <vector>

#include "uwdm/channel_grid.hpp"

namespace uwdm {

// Amplified-spontaneous-emission power per channel in mW, accumulated over
// n_spans identical spans. amp_gain_linear is the lumped end-of-span gain
// that restores each channel to its launch power (so >= 1); the noise figure
// comes from the channel's band.
std::vector<double> ase_power_mw(const ChannelGrid& grid,
                                 const std::vector<double>& amp_gain_linear,
                                 int n_spans);

// Received SNR per channel: signal over NLI + ASE + transceiver noise.
// trx_snr_linear is the back-to-back transceiver SNR as a linear ratio;
// pass kInfinity for an ideal transceiver.
std::vector<double> snr_linear(const std::vector<double>& powers_mw,
                               const std::vector<double>& eta_per_mw2,
                               const std::vector<double>& ase_mw,
                               double trx_snr_linear);

// Polarisation-multiplexed Shannon throughput in Tbps.
double throughput_tbps(const std::vector<double>& snr);

}  // namespace uwdm
