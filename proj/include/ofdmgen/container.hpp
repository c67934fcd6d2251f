#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ofdmgen/scaling.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Binary dataset container:
///
///   "OFDG" | u32 version | u64 header_len | header_len bytes UTF-8 JSON | payload
///
/// All integers little-endian. The payload is `count` items of float32
/// (little-endian); raw items are interleaved I/Q pairs [length][2], STFT
/// items are channel-major [re|im][bin][frame].
inline constexpr char kContainerMagic[4] = {'O', 'F', 'D', 'G'};
inline constexpr std::uint32_t kContainerVersion = 1;

enum class Representation { raw, stft };

Representation parse_representation(std::string_view name);
std::string_view to_string(Representation rep);

struct StftMeta {
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;
  std::size_t original_length = 0;
  std::size_t padded_length = 0;

  bool operator==(const StftMeta&) const = default;
};

struct ContainerHeader {
  std::uint32_t format_version = kContainerVersion;
  WaveformSpec spec;  // spec.seed is the dataset seed
  std::uint64_t count = 0;
  Representation representation = Representation::raw;
  std::optional<ScalingParams> scaling;
  std::optional<StftMeta> stft;

  /// float32 values per item.
  std::size_t item_floats() const;
  std::vector<std::size_t> item_shape() const;
  FeatureLayout layout() const;
  void validate() const;

  bool operator==(const ContainerHeader&) const = default;
};

std::string serialize_header(const ContainerHeader& header);
ContainerHeader parse_header(std::string_view json_text);

/// Streams items to disk. The header's count must equal the number of items
/// written before close().
class ContainerWriter {
 public:
  ContainerWriter(const std::filesystem::path& path, const ContainerHeader& header);
  ~ContainerWriter();
  ContainerWriter(const ContainerWriter&) = delete;
  ContainerWriter& operator=(const ContainerWriter&) = delete;

  void write(std::span<const float> items);
  void close();

 private:
  std::ofstream out_;
  ContainerHeader header_;
  std::uint64_t written_ = 0;
  bool closed_ = false;
};

class ContainerReader {
 public:
  explicit ContainerReader(const std::filesystem::path& path);

  const ContainerHeader& header() const noexcept { return header_; }

  /// Reads items [first, first + n).
  std::vector<float> read(std::uint64_t first, std::uint64_t n);
  std::vector<float> read_all() { return read(0, header_.count); }

 private:
  std::ifstream in_;
  ContainerHeader header_;
  std::uint64_t payload_offset_ = 0;
};

struct Dataset {
  ContainerHeader header;
  std::vector<float> data;
};

void write_container(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_container(const std::filesystem::path& path);

}  // namespace ofdmgen
