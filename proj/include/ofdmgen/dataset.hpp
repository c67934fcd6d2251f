#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ofdmgen/container.hpp"
#include "ofdmgen/scaling.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Waveforms generated per parallel chunk before the chunk is written.
inline constexpr std::size_t kGenerateChunk = 256;

/// Raw float32 payload for waveforms [first, first + n) of the dataset.
std::vector<float> generate_items(const WaveformSpec& spec, std::uint64_t first, std::uint64_t n);

/// In-memory dataset of `count` waveforms; `seed` replaces spec.seed.
Dataset generate_dataset(WaveformSpec spec, std::uint64_t count, std::uint64_t seed);

/// Streams a dataset to disk in chunks; memory use does not grow with count.
void generate_dataset_file(WaveformSpec spec, std::uint64_t count, std::uint64_t seed,
                           const std::filesystem::path& path);

/// Float conversions between waveforms and container items.
void append_raw(const IqWaveform& waveform, std::vector<float>& out);
IqWaveform raw_item(std::span<const float> item);

/// Decodes every item to an unscaled time-domain waveform (unscaling and
/// inverting the STFT as the header requires).
std::vector<IqWaveform> to_waveforms(const Dataset& dataset);

/// Converts items to `target` representation (unscaling first when the
/// source is scaled) and optionally applies min-max scaling fitted over the
/// converted dataset.
Dataset convert(const Dataset& dataset, Representation target, std::optional<ScalingMode> scaling);

/// File-to-file convert that works in chunks (two passes when scaling).
void convert_file(const std::filesystem::path& in, const std::filesystem::path& out, Representation target,
                  std::optional<ScalingMode> scaling);

/// A named group of dataset configurations from one experiment.
struct ExperimentPreset {
  std::string name;
  std::vector<std::pair<std::string, WaveformSpec>> specs;
};

/// complexity (3 symbol lengths x 3 allocations), modulation order, and
/// fading channel experiments.
const std::vector<ExperimentPreset>& experiment_presets();

/// Single configuration by name, e.g. "complexity-256-medium" or "channel-etu300".
WaveformSpec preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace ofdmgen
