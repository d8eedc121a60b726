#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace uwdm {

enum class BandId : uint8_t { O = 0, E, S, C, L, U };

constexpr const char* band_letter(BandId b) {
  constexpr const char* names[] = {"O", "E", "S", "C", "L", "U"};
  return names[static_cast<int>(b)];
}

struct BandInfo {
  BandId id;
  double lambda_min_nm;
  double lambda_max_nm;
  double noise_figure_db;
  int full_count;  // channels when fully populated
};

// O through U in wavelength order, with amplifier noise figures and full
// per-band channel counts on the 150 GHz grid.
const std::array<BandInfo, 6>& band_table();

// Set of bands, e.g. parsed from "OESCLU" or "CL".
class BandSet {
 public:
  BandSet() = default;
  static BandSet all();
  static BandSet parse(const std::string& letters);  // throws on unknown letter
  void add(BandId b) { mask_ |= bit(b); }
  bool contains(BandId b) const { return mask_ & bit(b); }
  bool empty() const { return mask_ == 0; }
  int capacity() const;  // total channels when all member bands are full
  std::string to_string() const;

 private:
  static uint8_t bit(BandId b) { return static_cast<uint8_t>(1u << static_cast<int>(b)); }
  uint8_t mask_ = 0;
};

struct Channel {
  double freq_thz;
  BandId band;
  int added_step;  // 0-based position in the population order
};

class ChannelGrid {
 public:
  static constexpr double kSymbolRateTHz = 0.148;
  static constexpr double kSpacingTHz = 0.150;
  static constexpr double kGuardNm = 5.0;

  // Channels sorted by ascending frequency.
  const std::vector<Channel>& channels() const { return channels_; }
  int size() const { return static_cast<int>(channels_.size()); }
  const Channel& at(int i) const { return channels_.at(static_cast<size_t>(i)); }
  double freq_thz(int i) const { return channels_[static_cast<size_t>(i)].freq_thz; }
  double wavelength_nm(int i) const;
  double noise_figure_db(int i) const;
  BandSet bands() const { return bands_; }

  // Channel index whose centre frequency is nearest to f.
  int nearest_channel(double f_thz) const;

  // Synthetic grid for experiments and tests: arbitrary centre frequencies,
  // bands assigned by wavelength (nearest band when outside every range).
  static ChannelGrid from_frequencies(const std::vector<double>& freqs_thz);

  friend ChannelGrid build_grid(int n_channels, BandSet bands);

 private:
  std::vector<Channel> channels_;
  BandSet bands_;
};

// First n channels of the fixed population order restricted to the given
// bands: C centre-out, then L, S, U, E, O, each growing away from the C-band.
// Band anchors come from the fully populated layout, so grids are prefix
// stable: build_grid(n) is a subset of build_grid(n+1).
ChannelGrid build_grid(int n_channels, BandSet bands = BandSet::all());

// Sum over populated bands of (max - min centre frequency + 150 GHz).
double occupied_bandwidth_thz(const ChannelGrid& grid);

// Sum of the full wavelength-range widths of the populated bands.
double band_edge_bandwidth_thz(const ChannelGrid& grid);

}  // namespace uwdm
