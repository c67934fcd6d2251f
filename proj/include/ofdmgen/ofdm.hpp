#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ofdmgen/rng.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Unit-average-power QAM alphabet. `points[label]` is the point carrying the
/// bit pattern `label` (MSB first), so bit labels and point indices coincide.
struct QamConstellation {
  int order = 0;
  int bits_per_symbol = 0;
  ComplexVector points;

  /// Index of the nearest point (hard decision).
  int nearest(Complex s) const;
};

/// Supported orders are 4, 16, 64 (square, Gray labeled) and 32 (cross,
/// quasi-Gray labeled).
QamConstellation build_constellation(int order);

/// Occupied subcarriers as DFT bin indices, listed in ascending frequency
/// (negative frequencies first). DC is never occupied.
struct Allocation {
  int symbol_len = 0;
  int n_max = 0;
  std::vector<int> occupied;

  std::size_t size() const noexcept { return occupied.size(); }
};

/// LTE maximum occupied subcarrier count (excluding DC) for a symbol length.
int max_occupied(int symbol_len);

/// Occupied count for an allocation class: round-half-up of 25/50/75 % of the
/// maximum.
int occupied_count(int symbol_len, AllocClass cls);

/// Centered contiguous block of `count` subcarriers around DC;
/// ceil(count/2) below DC and floor(count/2) above.
Allocation build_allocation(int symbol_len, int count);
Allocation build_allocation(int symbol_len, AllocClass cls);
Allocation build_allocation(const WaveformSpec& spec);

/// Maps bits (one per byte, values 0/1) to an n_symbols x |occupied| grid.
ResourceGrid map_bits(std::span<const std::uint8_t> bits, const QamConstellation& constellation,
                      const Allocation& allocation, int n_symbols);

/// Hard-decision inverse of map_bits.
std::vector<std::uint8_t> demap_bits(const ResourceGrid& grid, const QamConstellation& constellation);

/// Unitary inverse DFT per OFDM symbol plus cyclic prefix.
IqWaveform modulate(const ResourceGrid& grid, const WaveformSpec& spec);
IqWaveform modulate(const ResourceGrid& grid, const WaveformSpec& spec, const Allocation& allocation);

/// Strips each cyclic prefix, unitary forward DFT, keeps occupied bins.
ResourceGrid demodulate(const IqWaveform& waveform, const WaveformSpec& spec);
ResourceGrid demodulate(const IqWaveform& waveform, const WaveformSpec& spec, const Allocation& allocation);

/// Noise standard deviation per complex sample that yields the target EVM
/// with a unit-power constellation and unitary transforms: 10^(evm/20).
double calibrate_noise_sigma(double target_evm_db);

/// Adds circular complex Gaussian noise with variance sigma^2 per sample.
IqWaveform add_awgn(const IqWaveform& waveform, double sigma, Rng& rng);

/// Smallest occupied count that uses the Zadoff-Chu construction (3 resource blocks).
inline constexpr int kMinZadoffChuLength = 36;

/// First LTE uplink reference-signal base sequence (group 0, base 0) of the
/// given length: a Zadoff-Chu sequence over the largest prime below the
/// length, cyclically extended.
ComplexVector zadoff_chu_pilot(int n_occupied);

/// Largest prime strictly smaller than n.
int largest_prime_below(int n);

/// Row indices of the grid that carry data (all rows except the pilot).
std::vector<int> data_rows(const WaveformSpec& spec);

/// Number of random bits one waveform carries.
std::size_t bits_per_waveform(const WaveformSpec& spec);

struct GeneratedWaveform {
  IqWaveform waveform;
  ResourceGrid grid;  // transmitted symbols, pilot row included
  std::vector<std::uint8_t> bits;
};

/// Generates waveform number `index` of the dataset described by `spec`.
/// Randomness comes from streams keyed by (spec.seed, index).
GeneratedWaveform generate_waveform(const WaveformSpec& spec, std::uint64_t index);

}  // namespace ofdmgen
