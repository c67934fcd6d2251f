#include "ofdmgen/container.hpp"

#include <bit>
#include <cstring>
#include <string>

#include <json.hpp>

#include "ofdmgen/error.hpp"
#include "ofdmgen/serialize.hpp"

namespace ofdmgen {

using nlohmann::json;

Representation parse_representation(std::string_view name) {
  if (name == "raw") return Representation::raw;
  if (name == "stft") return Representation::stft;
  throw Error(ErrorCode::invalid_argument, "unknown representation '" + std::string(name) + "'");
}

std::string_view to_string(Representation rep) { return rep == Representation::raw ? "raw" : "stft"; }

std::size_t ContainerHeader::item_floats() const {
  std::size_t n = 1;
  for (auto d : item_shape()) n *= d;
  return n;
}

std::vector<std::size_t> ContainerHeader::item_shape() const {
  if (representation == Representation::raw) {
    const std::size_t len = stft ? stft->original_length : static_cast<std::size_t>(spec.waveform_len());
    return {len, 2};
  }
  if (!stft) throw Error(ErrorCode::format, "STFT container without STFT metadata");
  return {2, stft->window_len, stft->frames};
}

FeatureLayout ContainerHeader::layout() const {
  const auto shape = item_shape();
  return representation == Representation::raw ? FeatureLayout::raw(shape[0])
                                                : FeatureLayout::stft(shape[1], shape[2]);
}

void ContainerHeader::validate() const {
  if (format_version != kContainerVersion)
    throw Error(ErrorCode::format, "unsupported container version " + std::to_string(format_version));
  spec.validate();
  if (representation == Representation::stft) {
    if (!stft) throw Error(ErrorCode::format, "STFT container without STFT metadata");
    if (stft->original_length != static_cast<std::size_t>(spec.waveform_len()))
      throw Error(ErrorCode::format, "STFT metadata length disagrees with the waveform spec");
  }
  if (scaling) {
    const auto lay = layout();
    const std::size_t expected = scaling->mode == ScalingMode::global ? 1 : lay.n_features;
    if (scaling->mins.size() != expected) throw Error(ErrorCode::format, "scaling parameters do not match the layout");
  }
}

std::string serialize_header(const ContainerHeader& h) {
  json j;
  j["format_version"] = h.format_version;
  j["count"] = h.count;
  j["seed"] = h.spec.seed;
  j["representation"] = std::string(to_string(h.representation));
  j["item_shape"] = h.item_shape();
  j["spec"] = h.spec;
  j["scaling"] = h.scaling ? json(*h.scaling) : json(nullptr);
  if (h.stft) {
    j["stft"] = {{"window_len", h.stft->window_len},
                 {"hop", h.stft->hop},
                 {"frames", h.stft->frames},
                 {"original_length", h.stft->original_length},
                 {"padded_length", h.stft->padded_length}};
  } else {
    j["stft"] = nullptr;
  }
  return j.dump();
}

ContainerHeader parse_header(std::string_view text) {
  try {
    const json j = json::parse(text);
    ContainerHeader h;
    h.format_version = j.at("format_version").get<std::uint32_t>();
    if (h.format_version != kContainerVersion)
      throw Error(ErrorCode::format, "unsupported container version " + std::to_string(h.format_version));
    h.count = j.at("count").get<std::uint64_t>();
    h.spec = j.at("spec").get<WaveformSpec>();
    h.spec.seed = j.value("seed", h.spec.seed);
    h.representation = parse_representation(j.at("representation").get<std::string>());
    if (!j.at("scaling").is_null()) h.scaling = j.at("scaling").get<ScalingParams>();
    if (j.contains("stft") && !j.at("stft").is_null()) {
      const auto& s = j.at("stft");
      h.stft = StftMeta{s.at("window_len").get<std::size_t>(), s.at("hop").get<std::size_t>(),
                        s.at("frames").get<std::size_t>(), s.at("original_length").get<std::size_t>(),
                        s.at("padded_length").get<std::size_t>()};
    }
    if (j.contains("item_shape") && j.at("item_shape").get<std::vector<std::size_t>>() != h.item_shape())
      throw Error(ErrorCode::format, "item_shape disagrees with the header metadata");
    h.validate();
    return h;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("malformed container header: ") + e.what());
  }
}

namespace {

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::format, "truncated container preamble");
  return to_le(v);
}

}  // namespace

ContainerWriter::ContainerWriter(const std::filesystem::path& path, const ContainerHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc), header_(header) {
  if (!out_) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  header_.validate();
  const std::string text = serialize_header(header_);
  out_.write(kContainerMagic, 4);
  put<std::uint32_t>(out_, header_.format_version);
  put<std::uint64_t>(out_, text.size());
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out_) throw Error(ErrorCode::io, "write failed for " + path.string());
}

ContainerWriter::~ContainerWriter() {
  if (!closed_) out_.close();
}

void ContainerWriter::write(std::span<const float> items) {
  const std::size_t per_item = header_.item_floats();
  if (items.size() % per_item != 0) throw Error(ErrorCode::dimension_mismatch, "partial item written to container");
  written_ += items.size() / per_item;
  if (written_ > header_.count) throw Error(ErrorCode::dimension_mismatch, "more items written than the header declares");
  if constexpr (std::endian::native == std::endian::little) {
    out_.write(reinterpret_cast<const char*>(items.data()), static_cast<std::streamsize>(items.size_bytes()));
  } else {
    for (float v : items) put(out_, v);
  }
  if (!out_) throw Error(ErrorCode::io, "container write failed");
}

void ContainerWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (written_ != header_.count)
    throw Error(ErrorCode::dimension_mismatch, "container holds " + std::to_string(written_) + " items, header declares " +
                                                   std::to_string(header_.count));
  out_.close();
  if (out_.fail()) throw Error(ErrorCode::io, "container close failed");
}

ContainerReader::ContainerReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw Error(ErrorCode::io, "cannot open " + path.string());
  char magic[4] = {};
  in_.read(magic, 4);
  if (!in_ || std::memcmp(magic, kContainerMagic, 4) != 0)
    throw Error(ErrorCode::format, path.string() + " is not a dataset container (bad magic)");
  const auto version = get<std::uint32_t>(in_);
  if (version != kContainerVersion) throw Error(ErrorCode::format, "unsupported container version " + std::to_string(version));
  const auto header_len = get<std::uint64_t>(in_);
  const auto file_size = std::filesystem::file_size(path);
  if (header_len > file_size) throw Error(ErrorCode::format, "header length exceeds file size");
  std::string text(header_len, '\0');
  in_.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in_) throw Error(ErrorCode::format, "truncated container header");
  header_ = parse_header(text);
  if (header_.format_version != version) throw Error(ErrorCode::format, "header version disagrees with preamble");
  payload_offset_ = 16 + header_len;
  const std::uint64_t expected = payload_offset_ + header_.count * header_.item_floats() * sizeof(float);
  if (file_size < expected) throw Error(ErrorCode::format, "truncated payload in " + path.string());
  if (file_size > expected) throw Error(ErrorCode::format, "trailing bytes after payload in " + path.string());
}

std::vector<float> ContainerReader::read(std::uint64_t first, std::uint64_t n) {
  if (first + n > header_.count) throw Error(ErrorCode::invalid_argument, "item range outside the container");
  const std::size_t per_item = header_.item_floats();
  std::vector<float> out(n * per_item);
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(payload_offset_ + first * per_item * sizeof(float)));
  in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size() * sizeof(float)));
  if (!in_) throw Error(ErrorCode::format, "truncated payload");
  if constexpr (std::endian::native != std::endian::little)
    for (auto& v : out) v = to_le(v);
  return out;
}

void write_container(const std::filesystem::path& path, const Dataset& dataset) {
  ContainerWriter w(path, dataset.header);
  w.write(dataset.data);
  w.close();
}

Dataset read_container(const std::filesystem::path& path) {
  ContainerReader r(path);
  return {r.header(), r.read_all()};
}

}  // namespace ofdmgen
