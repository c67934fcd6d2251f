#include "ofdmgen/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ofdmgen/error.hpp"

namespace ofdmgen {

std::vector<double> TapProfile::normalized_powers() const {
  std::vector<double> lin(powers_db.size());
  std::transform(powers_db.begin(), powers_db.end(), lin.begin(),
                 [](double db) { return std::pow(10.0, db / 10.0); });
  const double total = std::accumulate(lin.begin(), lin.end(), 0.0);
  for (auto& p : lin) p /= total;
  return lin;
}

TapProfile tap_profile(ChannelProfile profile) {
  switch (profile) {
    case ChannelProfile::EPA:
      return {{0, 30, 70, 90, 110, 190, 410}, {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8}};
    case ChannelProfile::EVA:
      return {{0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
              {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}};
    case ChannelProfile::ETU:
      return {{0, 50, 120, 200, 230, 500, 1600, 2300, 5000},
              {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0}};
  }
  throw Error(ErrorCode::invalid_argument, "unknown channel profile");
}

ChannelProfile parse_channel_profile(std::string_view name) {
  if (name == "EPA" || name == "epa") return ChannelProfile::EPA;
  if (name == "EVA" || name == "eva") return ChannelProfile::EVA;
  if (name == "ETU" || name == "etu") return ChannelProfile::ETU;
  throw Error(ErrorCode::invalid_argument, "unknown channel profile '" + std::string(name) + "'");
}

std::string_view to_string(ChannelProfile profile) {
  switch (profile) {
    case ChannelProfile::EPA: return "EPA";
    case ChannelProfile::EVA: return "EVA";
    case ChannelProfile::ETU: return "ETU";
  }
  return "?";
}

ChannelRealization realize_channel(const ChannelSpec& spec, std::size_t n_samples, Rng& rng) {
  spec.validate();
  return realize_channel(tap_profile(spec.profile), spec.max_doppler_hz, spec.sample_rate_hz, n_samples, rng);
}

ChannelRealization realize_channel(const TapProfile& profile, double max_doppler_hz, double sample_rate_hz,
                                   std::size_t n_samples, Rng& rng, int n_sinusoids) {
  if (profile.delays_ns.size() != profile.powers_db.size() || profile.delays_ns.empty())
    throw Error(ErrorCode::invalid_argument, "tap profile delays and powers must be nonempty and equal length");
  if (n_samples == 0) throw Error(ErrorCode::invalid_argument, "channel realization needs at least one sample");
  if (n_sinusoids < 1) throw Error(ErrorCode::invalid_argument, "need at least one sinusoid per tap");

  const auto powers = profile.normalized_powers();
  const std::size_t n_taps = powers.size();
  ChannelRealization ch;
  ch.n_samples = n_samples;
  ch.gains.assign(n_samples * n_taps, Complex{});
  for (double d : profile.delays_ns)
    ch.tap_offsets.push_back(static_cast<int>(std::lround(d * 1e-9 * sample_rate_hz)));

  constexpr double two_pi = 2.0 * std::numbers::pi;
  // Phasors are advanced by complex rotation and resynchronized from the
  // closed form periodically to bound rounding drift.
  constexpr std::size_t kResync = 4096;
  const double doppler = two_pi * max_doppler_hz / sample_rate_hz;  // rad / sample
  std::vector<double> omega(n_sinusoids);
  std::vector<double> phase(n_sinusoids);
  ComplexVector rot(n_sinusoids);
  ComplexVector ph(n_sinusoids);

  for (std::size_t k = 0; k < n_taps; ++k) {
    // Angles of arrival jittered within equal strata of the circle; the
    // ensemble autocorrelation is then exactly J0(2 pi fD tau).
    for (int i = 0; i < n_sinusoids; ++i) {
      const double alpha = two_pi * (i + rng.uniform()) / n_sinusoids;
      omega[i] = doppler * std::cos(alpha);
      phase[i] = two_pi * rng.uniform();
      rot[i] = std::polar(1.0, omega[i]);
    }
    const double amp = std::sqrt(powers[k] / n_sinusoids);
    for (std::size_t n = 0; n < n_samples; ++n) {
      if (n % kResync == 0) {
        for (int i = 0; i < n_sinusoids; ++i)
          ph[i] = std::polar(1.0, std::fmod(omega[i] * static_cast<double>(n) + phase[i], two_pi));
      }
      Complex acc{};
      for (int i = 0; i < n_sinusoids; ++i) {
        acc += ph[i];
        ph[i] *= rot[i];
      }
      ch.gain(n, k) = amp * acc;
    }
  }
  return ch;
}

ChannelRealization static_channel(std::vector<int> tap_offsets, const ComplexVector& tap_gains,
                                  std::size_t n_samples) {
  if (tap_offsets.size() != tap_gains.size())
    throw Error(ErrorCode::invalid_argument, "tap offsets and gains differ in length");
  for (int d : tap_offsets)
    if (d < 0) throw Error(ErrorCode::invalid_argument, "tap delays must be nonnegative");
  ChannelRealization ch;
  ch.n_samples = n_samples;
  ch.tap_offsets = std::move(tap_offsets);
  ch.gains.resize(n_samples * tap_gains.size());
  for (std::size_t n = 0; n < n_samples; ++n)
    std::copy(tap_gains.begin(), tap_gains.end(), ch.gains.begin() + n * tap_gains.size());
  return ch;
}

IqWaveform apply_channel(const IqWaveform& waveform, const ChannelRealization& channel) {
  if (channel.n_samples < waveform.size())
    throw Error(ErrorCode::dimension_mismatch, "channel realization shorter than the waveform");
  IqWaveform out;
  out.samples.assign(waveform.size(), Complex{});
  const std::size_t n_taps = channel.n_taps();
  for (std::size_t n = 0; n < waveform.size(); ++n) {
    Complex acc{};
    for (std::size_t k = 0; k < n_taps; ++k) {
      const std::size_t d = static_cast<std::size_t>(channel.tap_offsets[k]);
      if (d <= n) acc += channel.gain(n, k) * waveform.samples[n - d];
    }
    out.samples[n] = acc;
  }
  return out;
}

FreqResponse channel_freq_response(const ChannelRealization& channel, std::size_t time_index,
                                   const Allocation& allocation) {
  if (time_index >= channel.n_samples) throw Error(ErrorCode::dimension_mismatch, "time index outside realization");
  FreqResponse h;
  h.values.resize(allocation.size());
  const double n = allocation.symbol_len;
  for (std::size_t c = 0; c < allocation.size(); ++c) {
    Complex acc{};
    for (std::size_t k = 0; k < channel.n_taps(); ++k) {
      const double arg = -2.0 * std::numbers::pi * allocation.occupied[c] * channel.tap_offsets[k] / n;
      acc += channel.gain(time_index, k) * std::polar(1.0, arg);
    }
    h.values[c] = acc;
  }
  return h;
}

FreqResponse estimate_freq_response(std::span<const Complex> demod_pilot, std::span<const Complex> known_pilot) {
  if (demod_pilot.size() != known_pilot.size())
    throw Error(ErrorCode::dimension_mismatch, "pilot lengths differ");
  FreqResponse h;
  h.values.resize(known_pilot.size());
  for (std::size_t k = 0; k < known_pilot.size(); ++k) {
    if (known_pilot[k] == Complex{}) throw Error(ErrorCode::invalid_argument, "known pilot has a zero entry");
    h.values[k] = demod_pilot[k] / known_pilot[k];
  }
  return h;
}

EqualizedGrid equalize(const ResourceGrid& grid, const FreqResponse& response) {
  if (grid.n_subcarriers() != response.size())
    throw Error(ErrorCode::dimension_mismatch, "frequency response length does not match the grid");
  EqualizedGrid out{grid, {}};
  for (std::size_t c = 0; c < response.size(); ++c) {
    const Complex h = response.values[c];
    const bool weak = std::abs(h) < kEqualizerFloor;
    if (weak) out.flagged.push_back(static_cast<int>(c));
    for (std::size_t s = 0; s < grid.n_symbols(); ++s) out.grid(s, c) = weak ? Complex{} : grid(s, c) / h;
  }
  return out;
}

double coherence_bandwidth(const FreqResponse& response, double subcarrier_spacing_hz) {
  const auto& h = response.values;
  const std::size_t n = h.size();
  if (n < 8) throw Error(ErrorCode::invalid_argument, "coherence bandwidth needs at least 8 subcarriers");

  // Unbiased autocorrelation over subcarrier lag, normalized to lag 0.
  auto corr = [&](std::size_t lag) {
    Complex acc{};
    for (std::size_t k = 0; k + lag < n; ++k) acc += h[k + lag] * std::conj(h[k]);
    return std::abs(acc) / static_cast<double>(n - lag);
  };
  const double r0 = corr(0);
  if (r0 == 0.0) return 0.0;
  double prev = 1.0;
  for (std::size_t m = 1; m < n; ++m) {
    const double cur = corr(m) / r0;
    if (cur <= 0.5) {
      const double frac = (prev - 0.5) / (prev - cur);
      return (static_cast<double>(m - 1) + frac) * subcarrier_spacing_hz;
    }
    prev = cur;
  }
  return static_cast<double>(n - 1) * subcarrier_spacing_hz;
}

}  // namespace ofdmgen
