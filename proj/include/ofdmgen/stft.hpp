#pragma once

#include <cstddef>
#include <vector>

#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Complex short-time spectrum. Rows are frequency bins in centered order
/// (row window_len/2 holds DC), columns are frames. Values are stored
/// row-major, i.e. values[bin * frames + frame].
struct StftGrid {
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;
  std::size_t original_length = 0;  // samples before zero padding
  std::size_t padded_length = 0;    // power of two the waveform was padded to
  ComplexVector values;

  std::size_t bins() const noexcept { return window_len; }
  Complex& at(std::size_t bin, std::size_t frame) { return values[bin * frames + frame]; }
  const Complex& at(std::size_t bin, std::size_t frame) const { return values[bin * frames + frame]; }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Frames produced for a waveform of `length` samples.
std::size_t stft_frame_count(std::size_t length, std::size_t window_len);

/// Zero-pads to the next power of two, frames with window_len/2 zeros on
/// both ends, hop window_len/4, Hann window, full DFT per frame with the
/// zero-frequency bin moved to the center.
StftGrid stft(const IqWaveform& waveform, std::size_t window_len);

/// Weighted overlap-add inverse; drops the zero padding recorded in the grid.
IqWaveform istft(const StftGrid& grid);

}  // namespace ofdmgen
