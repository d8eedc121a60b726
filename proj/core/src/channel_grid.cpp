#include "uwdm/channel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uwdm/units.hpp"

namespace uwdm {

const std::array<BandInfo, 6>& band_table() {
  static const std::array<BandInfo, 6> table = {{
      {BandId::O, 1260.0, 1360.0, 5.0, 116},
      {BandId::E, 1360.0, 1460.0, 7.0, 100},
      {BandId::S, 1460.0, 1530.0, 7.0, 62},
      {BandId::C, 1530.0, 1565.0, 5.0, 29},
      {BandId::L, 1565.0, 1625.0, 6.0, 47},
      {BandId::U, 1625.0, 1675.0, 8.0, 36},
  }};
  return table;
}

BandSet BandSet::all() {
  BandSet s;
  for (const auto& b : band_table()) s.add(b.id);
  return s;
}

BandSet BandSet::parse(const std::string& letters) {
  BandSet s;
  for (char c : letters) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'O': s.add(BandId::O); break;
      case 'E': s.add(BandId::E); break;
      case 'S': s.add(BandId::S); break;
      case 'C': s.add(BandId::C); break;
      case 'L': s.add(BandId::L); break;
      case 'U': s.add(BandId::U); break;
      default:
        throw std::invalid_argument(std::string("unknown band letter '") + c + "'");
    }
  }
  if (s.empty()) throw std::invalid_argument("empty band set");
  return s;
}

int BandSet::capacity() const {
  int n = 0;
  for (const auto& b : band_table())
    if (contains(b.id)) n += b.full_count;
  return n;
}

std::string BandSet::to_string() const {
  std::string out;
  for (const auto& b : band_table())
    if (contains(b.id)) out += band_letter(b.id);
  return out;
}

namespace {

const BandInfo& info(BandId id) { return band_table()[static_cast<size_t>(id)]; }

// The fully populated layout. C sits centred on the global 150 GHz grid and
// fills centre-out; every other band is anchored so that its edge channel
// nearest the C-band keeps an exact 5 nm gap to the already-placed neighbour,
// then fills away from C. With the 150 GHz slots this uses the band widths
// completely, so outer edge channels overhang their nominal band range by a
// few nm; everything stays inside the default fibre grid.
struct FullLayout {
  // Channel frequencies in population order, with band ids.
  std::vector<Channel> order;
};

const FullLayout& full_layout() {
  static const FullLayout layout = [] {
    constexpr double c = constants::kSpeedOfLight;
    constexpr double df = ChannelGrid::kSpacingTHz;
    constexpr double guard = ChannelGrid::kGuardNm;
    FullLayout l;
    int step = 0;

    // C band: centre channel on the global grid, then alternate up/down.
    const BandInfo& cb = info(BandId::C);
    double f_mid = 0.5 * (c / cb.lambda_max_nm + c / cb.lambda_min_nm);
    double f0 = std::round(f_mid / df) * df;
    int half = (cb.full_count - 1) / 2;
    l.order.push_back({f0, BandId::C, step++});
    for (int k = 1; k <= half; ++k) {
      l.order.push_back({f0 + k * df, BandId::C, step++});
      l.order.push_back({f0 - k * df, BandId::C, step++});
    }
    double c_low_f = f0 - half * df;   // longest C wavelength
    double c_high_f = f0 + half * df;  // shortest C wavelength

    // L: starts one guard above the longest C wavelength, grows to longer
    // wavelengths (lower frequency).
    double f_l0 = c / (c / c_low_f + guard);
    for (int k = 0; k < info(BandId::L).full_count; ++k)
      l.order.push_back({f_l0 - k * df, BandId::L, step++});
    double l_last_f = f_l0 - (info(BandId::L).full_count - 1) * df;

    // S: starts one guard below the shortest C wavelength, grows upward in
    // frequency.
    double f_s0 = c / (c / c_high_f - guard);
    for (int k = 0; k < info(BandId::S).full_count; ++k)
      l.order.push_back({f_s0 + k * df, BandId::S, step++});
    double s_last_f = f_s0 + (info(BandId::S).full_count - 1) * df;

    // U: beyond the full L band.
    double f_u0 = c / (c / l_last_f + guard);
    for (int k = 0; k < info(BandId::U).full_count; ++k)
      l.order.push_back({f_u0 - k * df, BandId::U, step++});

    // E: beyond the full S band.
    double f_e0 = c / (c / s_last_f - guard);
    for (int k = 0; k < info(BandId::E).full_count; ++k)
      l.order.push_back({f_e0 + k * df, BandId::E, step++});
    double e_last_f = f_e0 + (info(BandId::E).full_count - 1) * df;

    // O: beyond the full E band.
    double f_o0 = c / (c / e_last_f - guard);
    for (int k = 0; k < info(BandId::O).full_count; ++k)
      l.order.push_back({f_o0 + k * df, BandId::O, step++});

    return l;
  }();
  return layout;
}

BandId band_by_wavelength(double wl) {
  for (const auto& b : band_table())
    if (wl >= b.lambda_min_nm && wl <= b.lambda_max_nm) return b.id;
  // Outside every range: nearest band edge.
  double best = std::numeric_limits<double>::infinity();
  BandId best_id = BandId::C;
  for (const auto& b : band_table()) {
    double d = std::min(std::abs(wl - b.lambda_min_nm), std::abs(wl - b.lambda_max_nm));
    if (d < best) { best = d; best_id = b.id; }
  }
  return best_id;
}

}  // namespace

double ChannelGrid::wavelength_nm(int i) const {
  return freq_to_wavelength_nm(freq_thz(i));
}

double ChannelGrid::noise_figure_db(int i) const {
  return info(channels_[static_cast<size_t>(i)].band).noise_figure_db;
}

int ChannelGrid::nearest_channel(double f_thz) const {
  if (channels_.empty()) throw std::invalid_argument("nearest_channel on empty grid");
  auto it = std::lower_bound(channels_.begin(), channels_.end(), f_thz,
                             [](const Channel& ch, double f) { return ch.freq_thz < f; });
  if (it == channels_.begin()) return 0;
  if (it == channels_.end()) return static_cast<int>(channels_.size()) - 1;
  size_t hi = static_cast<size_t>(it - channels_.begin());
  size_t lo = hi - 1;
  return (f_thz - channels_[lo].freq_thz <= channels_[hi].freq_thz - f_thz)
             ? static_cast<int>(lo)
             : static_cast<int>(hi);
}

ChannelGrid ChannelGrid::from_frequencies(const std::vector<double>& freqs_thz) {
  if (freqs_thz.empty()) throw std::invalid_argument("from_frequencies: no channels");
  ChannelGrid g;
  int step = 0;
  for (double f : freqs_thz) {
    if (f <= 0.0) throw std::invalid_argument("from_frequencies: non-positive frequency");
    g.channels_.push_back({f, band_by_wavelength(freq_to_wavelength_nm(f)), step++});
  }
  std::sort(g.channels_.begin(), g.channels_.end(),
            [](const Channel& a, const Channel& b) { return a.freq_thz < b.freq_thz; });
  for (size_t i = 1; i < g.channels_.size(); ++i)
    if (g.channels_[i].freq_thz == g.channels_[i - 1].freq_thz)
      throw std::invalid_argument("from_frequencies: duplicate frequency");
  for (const auto& ch : g.channels_) g.bands_.add(ch.band);
  return g;
}

ChannelGrid build_grid(int n_channels, BandSet bands) {
  if (bands.empty()) throw std::invalid_argument("build_grid: empty band set");
  int capacity = bands.capacity();
  if (n_channels < 1)
    throw std::invalid_argument("build_grid: need at least one channel");
  if (n_channels > capacity)
    throw std::invalid_argument("build_grid: " + std::to_string(n_channels) +
                                " channels requested but bands " + bands.to_string() +
                                " hold at most " + std::to_string(capacity));
  ChannelGrid g;
  g.bands_ = bands;
  int taken = 0;
  for (const Channel& ch : full_layout().order) {
    if (!bands.contains(ch.band)) continue;
    g.channels_.push_back({ch.freq_thz, ch.band, taken});
    if (++taken == n_channels) break;
  }
  std::sort(g.channels_.begin(), g.channels_.end(),
            [](const Channel& a, const Channel& b) { return a.freq_thz < b.freq_thz; });
  return g;
}

double occupied_bandwidth_thz(const ChannelGrid& grid) {
  double total = 0.0;
  for (const auto& b : band_table()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool seen = false;
    for (const auto& ch : grid.channels()) {
      if (ch.band != b.id) continue;
      lo = std::min(lo, ch.freq_thz);
      hi = std::max(hi, ch.freq_thz);
      seen = true;
    }
    if (seen) total += hi - lo + ChannelGrid::kSpacingTHz;
  }
  return total;
}

double band_edge_bandwidth_thz(const ChannelGrid& grid) {
  double total = 0.0;
  for (const auto& b : band_table()) {
    bool seen = false;
    for (const auto& ch : grid.channels())
      if (ch.band == b.id) { seen = true; break; }
    if (seen)
      total += wavelength_to_freq_thz(b.lambda_min_nm) -
               wavelength_to_freq_thz(b.lambda_max_nm);
  }
  return total;
}

}  // namespace uwdm
