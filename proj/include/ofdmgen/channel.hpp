#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ofdmgen/ofdm.hpp"
#include "ofdmgen/rng.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Power delay profile of a tapped delay line.
struct TapProfile {
  std::vector<double> delays_ns;
  std::vector<double> powers_db;

  /// Linear tap powers scaled so that they sum to one.
  std::vector<double> normalized_powers() const;
};

/// Extended pedestrian / vehicular / typical urban delay profiles (3GPP TS
/// 36.101 Annex B.2.1).
TapProfile tap_profile(ChannelProfile profile);

ChannelProfile parse_channel_profile(std::string_view name);
std::string_view to_string(ChannelProfile profile);

/// Time-varying tap gains, stored time-major: gain(n, k) is tap k at sample n.
struct ChannelRealization {
  std::size_t n_samples = 0;
  std::vector<int> tap_offsets;  // delays in samples
  ComplexVector gains;

  std::size_t n_taps() const noexcept { return tap_offsets.size(); }
  Complex gain(std::size_t n, std::size_t tap) const { return gains[n * n_taps() + tap]; }
  Complex& gain(std::size_t n, std::size_t tap) { return gains[n * n_taps() + tap]; }
};

/// Default number of sinusoids per tap in the sum-of-sinusoids fader.
inline constexpr int kDefaultSinusoids = 64;

/// Rayleigh fading realization: each tap is an independent sum-of-sinusoids
/// process with a Jakes Doppler spectrum, scaled by its normalized profile
/// power. Delays are rounded to the nearest sample.
ChannelRealization realize_channel(const ChannelSpec& spec, std::size_t n_samples, Rng& rng);
ChannelRealization realize_channel(const TapProfile& profile, double max_doppler_hz, double sample_rate_hz,
                                   std::size_t n_samples, Rng& rng, int n_sinusoids = kDefaultSinusoids);

/// Time-invariant realization with the given sample delays and gains.
ChannelRealization static_channel(std::vector<int> tap_offsets, const ComplexVector& tap_gains,
                                  std::size_t n_samples);

/// y[n] = sum_k g_k[n] x[n - d_k]; the convolution tail is dropped.
IqWaveform apply_channel(const IqWaveform& waveform, const ChannelRealization& channel);

struct FreqResponse {
  ComplexVector values;  // one per occupied subcarrier, ascending frequency

  std::size_t size() const noexcept { return values.size(); }
};

/// True response of the channel at one time instant on the allocated bins of
/// a `allocation.symbol_len`-point DFT.
FreqResponse channel_freq_response(const ChannelRealization& channel, std::size_t time_index,
                                   const Allocation& allocation);

/// Least-squares pilot estimate H[k] = received[k] / known[k].
FreqResponse estimate_freq_response(std::span<const Complex> demod_pilot, std::span<const Complex> known_pilot);

inline constexpr double kEqualizerFloor = 1e-12;

struct EqualizedGrid {
  ResourceGrid grid;
  std::vector<int> flagged;  // subcarriers whose |H| fell below kEqualizerFloor (zeroed)
};

/// One-tap zero-forcing equalization of every OFDM symbol.
EqualizedGrid equalize(const ResourceGrid& grid, const FreqResponse& response);

/// Half-width at half-maximum of the frequency autocorrelation of `response`,
/// in Hz. Returns the full measured span when the magnitude never drops to
/// one half.
double coherence_bandwidth(const FreqResponse& response, double subcarrier_spacing_hz);

}  // namespace ofdmgen
