#pragma once

#include <cstddef>
#include <span>

#include "ofdmgen/types.hpp"

/// Thin wrapper over FFTW. Plans are created once per (length, direction)
/// with FFTW_ESTIMATE so results are bit-reproducible, and cached. Execution
/// is safe from multiple threads.
namespace ofdmgen::fft {

/// In-place unnormalized forward DFT: X[k] = sum_n x[n] exp(-j 2 pi k n / N).
void forward(std::span<Complex> data);

/// In-place unnormalized inverse DFT: x[n] = sum_k X[k] exp(+j 2 pi k n / N).
void inverse(std::span<Complex> data);

/// Unitary variants (scaled by 1/sqrt(N)).
void forward_unitary(std::span<Complex> data);
void inverse_unitary(std::span<Complex> data);

/// Rotates so the zero-frequency bin sits at index N/2 (even N).
void shift(std::span<Complex> data);
void inverse_shift(std::span<Complex> data);

std::size_t next_pow2(std::size_t n);

}  // namespace ofdmgen::fft
