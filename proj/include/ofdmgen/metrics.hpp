#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ofdmgen/ofdm.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Floor applied to PSD bins so log ratios stay finite.
inline constexpr double kPsdFloor = 1e-20;
/// EVM reported for an exact match.
inline constexpr double kEvmFloorDb = -150.0;

/// Power spectral density on the normalized frequency grid
/// f_d = -0.5 + i / nfft, i = 0 .. nfft-1.
struct Psd {
  std::vector<double> values;

  std::size_t nfft() const noexcept { return values.size(); }
  double df() const { return 1.0 / static_cast<double>(values.size()); }
  double frequency(std::size_t i) const { return -0.5 + static_cast<double>(i) * df(); }
};

struct MultitaperConfig {
  double nw = 4.0;
  std::size_t tapers = 7;
};

/// Thomson multitaper estimate over the full waveform, nfft = next power of
/// two >= length, eigenspectra averaged with equal weights.
Psd multitaper_psd(const IqWaveform& waveform, const MultitaperConfig& cfg = {});

/// Per-bin median of the individual multitaper estimates.
Psd median_psd(std::span<const IqWaveform> waveforms, const MultitaperConfig& cfg = {});
Psd median_psd(std::span<const Psd> psds);

/// Scale-invariant log-spectral geodesic distance with natural logarithm:
/// sqrt( sum_k r_k^2 df - (sum_k r_k df)^2 ),  r_k = ln(Pg[k] / Pt[k]).
double psd_geodesic_distance(const Psd& generated, const Psd& target);

/// RMS error vector magnitude in dB against nearest constellation points,
/// normalized by the mean constellation power. Floors at kEvmFloorDb.
double evm_db(std::span<const Complex> measured, const QamConstellation& constellation);
double evm_db(const ResourceGrid& measured, const QamConstellation& constellation);

/// Median of a nonempty set (mean of the two middle values for even sizes).
double median(std::vector<double> values);

/// Median of per-grid EVM values.
double median_evm_db(std::span<const ResourceGrid> grids, const QamConstellation& constellation);

/// 2-D I/Q histogram: 150 x 150 bins over [-1.5, 1.5]^2. Symbols outside the
/// region are counted in `dropped` instead of being binned. counts are
/// indexed [i_bin * bins + q_bin]; the upper edge 1.5 falls in the last bin.
struct ConstellationHistogram {
  static constexpr int kBins = 150;
  static constexpr double kExtent = 1.5;

  std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(kBins * kBins, 0);
  std::uint64_t dropped = 0;

  void add(Complex s);
  void add(std::span<const Complex> symbols);
  void merge(const ConstellationHistogram& other);
  std::uint64_t binned() const;
  std::uint64_t operator()(int i_bin, int q_bin) const { return counts[i_bin * kBins + q_bin]; }
  static std::optional<int> bin_of(double v);
  /// Center of a bin in I/Q units.
  static double bin_center(int bin) { return -kExtent + (bin + 0.5) * (2.0 * kExtent / kBins); }
};

/// Energy-normalized cross-correlation of each cyclic prefix with the
/// prefix-free waveform. profiles[s][lag] covers window start positions
/// lag = 0 .. stripped_len - cp_len in the stripped waveform; symbol s
/// itself starts at lag s * symbol_len, so relative lag = lag - s * symbol_len.
/// A perfect prefix peaks at relative lag symbol_len - cp_len (the tail it copies).
struct CpCorrelation {
  std::size_t symbol_len = 0;
  std::size_t cp_len = 0;
  std::vector<std::vector<double>> profiles;
  std::vector<double> symbol_max;  // peak magnitude per prefix
  double max = 0.0;                // largest over all prefixes

  std::size_t n_lags() const { return profiles.empty() ? 0 : profiles.front().size(); }
  /// Relative lag of the peak for prefix s.
  std::ptrdiff_t peak_relative_lag(std::size_t s) const;
  /// Relative lag where an exact prefix peaks.
  std::ptrdiff_t expected_relative_lag() const { return static_cast<std::ptrdiff_t>(symbol_len - cp_len); }
};

CpCorrelation cp_crosscorr(const IqWaveform& waveform, const WaveformSpec& spec);

/// Per-lag median over a set of profiles with identical shape.
CpCorrelation median_cp_profile(std::span<const CpCorrelation> correlations);

/// |R_gen - R_target| / |R_target| * 100 with R the median per-waveform maxima.
double cp_relerr_pct(double r_gen, double r_target);
double cp_relerr_pct(std::span<const IqWaveform> generated, std::span<const IqWaveform> target,
                     const WaveformSpec& spec);

}  // namespace ofdmgen
