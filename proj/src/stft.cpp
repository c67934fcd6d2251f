#include "ofdmgen/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ofdmgen/error.hpp"
#include "ofdmgen/fft.hpp"

namespace ofdmgen {

namespace {

void check_window(std::size_t window_len) {
  if (window_len < 4 || window_len % 4 != 0)
    throw Error(ErrorCode::invalid_argument, "STFT window length must be a positive multiple of 4");
}

}  // namespace

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

std::size_t stft_frame_count(std::size_t length, std::size_t window_len) {
  check_window(window_len);
  const std::size_t padded = fft::next_pow2(length);
  const std::size_t hop = window_len / 4;
  if (padded < window_len || padded % hop != 0)
    throw Error(ErrorCode::invalid_argument, "padded length " + std::to_string(padded) +
                                                 " incompatible with window length " + std::to_string(window_len));
  return padded / hop + 1;
}

StftGrid stft(const IqWaveform& waveform, std::size_t window_len) {
  StftGrid g;
  g.frames = stft_frame_count(waveform.size(), window_len);
  g.window_len = window_len;
  g.hop = window_len / 4;
  g.original_length = waveform.size();
  g.padded_length = fft::next_pow2(waveform.size());
  g.values.assign(g.window_len * g.frames, Complex{});

  // Centered framing: frame m covers padded[m * hop - W/2, m * hop + W/2).
  const auto w = hann_window(window_len);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window_len / 2);
  const std::ptrdiff_t n_orig = static_cast<std::ptrdiff_t>(waveform.size());
  ComplexVector frame(window_len);
  for (std::size_t m = 0; m < g.frames; ++m) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(m * g.hop) - half;
    for (std::size_t i = 0; i < window_len; ++i) {
      const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(i);
      frame[i] = (t >= 0 && t < n_orig) ? waveform.samples[t] * w[i] : Complex{};
    }
    fft::forward(frame);
    fft::shift(frame);
    for (std::size_t b = 0; b < window_len; ++b) g.at(b, m) = frame[b];
  }
  return g;
}

IqWaveform istft(const StftGrid& grid) {
  check_window(grid.window_len);
  const std::size_t wl = grid.window_len;
  if (grid.hop == 0 || grid.hop > wl || wl % grid.hop != 0)
    throw Error(ErrorCode::invalid_argument, "STFT hop must divide the window length");
  if (grid.values.size() != wl * grid.frames) throw Error(ErrorCode::dimension_mismatch, "STFT grid size mismatch");
  if (grid.original_length > grid.padded_length || grid.frames != grid.padded_length / grid.hop + 1)
    throw Error(ErrorCode::dimension_mismatch, "STFT padding metadata inconsistent with the frame count");

  const auto w = hann_window(wl);
  // Squared windows must overlap-add to a constant for exact inversion.
  std::vector<double> period(grid.hop, 0.0);
  for (std::size_t i = 0; i < wl; ++i) period[i % grid.hop] += w[i] * w[i];
  const auto [lo, hi] = std::minmax_element(period.begin(), period.end());
  if (*lo <= 0.0 || (*hi - *lo) > 1e-9 * *hi)
    throw Error(ErrorCode::invalid_argument, "window and hop violate the constant overlap-add condition");

  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(wl / 2);
  const std::ptrdiff_t n_out = static_cast<std::ptrdiff_t>(grid.padded_length);
  ComplexVector acc(grid.padded_length);
  std::vector<double> norm(grid.padded_length, 0.0);
  ComplexVector frame(wl);
  for (std::size_t m = 0; m < grid.frames; ++m) {
    for (std::size_t b = 0; b < wl; ++b) frame[b] = grid.at(b, m);
    fft::inverse_shift(frame);
    fft::inverse(frame);
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(m * grid.hop) - half;
    for (std::size_t i = 0; i < wl; ++i) {
      const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(i);
      if (t < 0 || t >= n_out) continue;
      acc[t] += frame[i] * (w[i] / static_cast<double>(wl));
      norm[t] += w[i] * w[i];
    }
  }
  IqWaveform out;
  out.samples.resize(grid.original_length);
  for (std::size_t t = 0; t < grid.original_length; ++t) {
    if (norm[t] <= 1e-12) throw Error(ErrorCode::invalid_argument, "sample not covered by any analysis window");
    out.samples[t] = acc[t] / norm[t];
  }
  return out;
}

}  // namespace ofdmgen
