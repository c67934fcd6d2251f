#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ofdmgen {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Complex baseband time series.
struct IqWaveform {
  ComplexVector samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool operator==(const IqWaveform&) const = default;
};

/// QAM symbols indexed by (OFDM symbol, occupied subcarrier). Columns follow
/// the order of Allocation::occupied, i.e. ascending frequency.
class ResourceGrid {
 public:
  ResourceGrid() = default;
  ResourceGrid(std::size_t n_symbols, std::size_t n_subcarriers)
      : rows_(n_symbols), cols_(n_subcarriers), data_(n_symbols * n_subcarriers) {}

  std::size_t n_symbols() const noexcept { return rows_; }
  std::size_t n_subcarriers() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex& operator()(std::size_t sym, std::size_t sc) { return data_[sym * cols_ + sc]; }
  const Complex& operator()(std::size_t sym, std::size_t sc) const { return data_[sym * cols_ + sc]; }

  std::span<Complex> row(std::size_t sym) { return {data_.data() + sym * cols_, cols_}; }
  std::span<const Complex> row(std::size_t sym) const { return {data_.data() + sym * cols_, cols_}; }

  std::span<Complex> values() noexcept { return data_; }
  std::span<const Complex> values() const noexcept { return data_; }

  bool operator==(const ResourceGrid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ComplexVector data_;
};

enum class AllocClass { small, medium, large };

enum class ChannelProfile { EPA, EVA, ETU };

/// Stochastic tapped-delay-line fading configuration.
struct ChannelSpec {
  ChannelProfile profile = ChannelProfile::EPA;
  double max_doppler_hz = 5.0;
  double sample_rate_hz = 7.68e6;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ChannelSpec&) const = default;
};

/// Full parameterization of one synthetic OFDM dataset.
///
/// The occupied subcarrier count is either derived from `alloc_class` or
/// given explicitly through `occupied_count`. A target EVM of -infinity
/// denotes a noiseless dataset.
struct WaveformSpec {
  int symbol_len = 128;
  int n_symbols = 6;
  int cp_num = 1;  // cyclic prefix fraction numerator
  int cp_den = 4;  // cyclic prefix fraction denominator
  AllocClass alloc_class = AllocClass::medium;
  std::optional<int> occupied_count;
  int mod_order = 16;
  double target_evm_db = -25.0;
  bool pilot_enabled = false;
  int pilot_position = 3;
  std::optional<ChannelSpec> channel;
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) on any violated invariant.
  void validate() const;

  int cp_len() const { return symbol_len * cp_num / cp_den; }
  int block_len() const { return symbol_len + cp_len(); }
  int waveform_len() const { return n_symbols * block_len(); }
  bool noiseless() const { return target_evm_db == -std::numeric_limits<double>::infinity(); }

  bool operator==(const WaveformSpec&) const = default;
};

}  // namespace ofdmgen
