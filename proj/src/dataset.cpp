#include "ofdmgen/dataset.hpp"

#include <algorithm>

#include "ofdmgen/error.hpp"
#include "ofdmgen/fft.hpp"
#include "ofdmgen/ofdm.hpp"
#include "ofdmgen/parallel.hpp"
#include "ofdmgen/stft.hpp"

namespace ofdmgen {

void append_raw(const IqWaveform& waveform, std::vector<float>& out) {
  for (const auto& s : waveform.samples) {
    out.push_back(static_cast<float>(s.real()));
    out.push_back(static_cast<float>(s.imag()));
  }
}

IqWaveform raw_item(std::span<const float> item) {
  IqWaveform w;
  w.samples.resize(item.size() / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = Complex(item[2 * i], item[2 * i + 1]);
  return w;
}

std::vector<float> generate_items(const WaveformSpec& spec, std::uint64_t first, std::uint64_t n) {
  spec.validate();
  const std::size_t per_item = 2 * static_cast<std::size_t>(spec.waveform_len());
  std::vector<float> out(n * per_item);
  parallel_for(n, [&](std::size_t i) {
    const auto g = generate_waveform(spec, first + i);
    float* dst = out.data() + i * per_item;
    for (const auto& s : g.waveform.samples) {
      *dst++ = static_cast<float>(s.real());
      *dst++ = static_cast<float>(s.imag());
    }
  });
  return out;
}

namespace {

ContainerHeader raw_header(const WaveformSpec& spec, std::uint64_t count) {
  ContainerHeader h;
  h.spec = spec;
  h.count = count;
  h.representation = Representation::raw;
  return h;
}

}  // namespace

Dataset generate_dataset(WaveformSpec spec, std::uint64_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::invalid_argument, "dataset count must be positive");
  spec.seed = seed;
  spec.validate();
  return {raw_header(spec, count), generate_items(spec, 0, count)};
}

void generate_dataset_file(WaveformSpec spec, std::uint64_t count, std::uint64_t seed,
                           const std::filesystem::path& path) {
  if (count == 0) throw Error(ErrorCode::invalid_argument, "dataset count must be positive");
  spec.seed = seed;
  spec.validate();
  ContainerWriter writer(path, raw_header(spec, count));
  for (std::uint64_t first = 0; first < count; first += kGenerateChunk) {
    const std::uint64_t n = std::min<std::uint64_t>(kGenerateChunk, count - first);
    writer.write(generate_items(spec, first, n));
  }
  writer.close();
}

namespace {

StftMeta stft_meta(const WaveformSpec& spec) {
  const std::size_t len = spec.waveform_len();
  const std::size_t wl = spec.symbol_len;
  return {wl, wl / 4, stft_frame_count(len, wl), len, fft::next_pow2(len)};
}

// Unscaled time-domain waveform of one item.
IqWaveform decode_item(const ContainerHeader& h, std::span<const float> item) {
  std::vector<float> buf(item.begin(), item.end());
  if (h.scaling) unscale(std::span<float>(buf), h.layout(), *h.scaling);
  if (h.representation == Representation::raw) return raw_item(buf);
  StftGrid g;
  g.window_len = h.stft->window_len;
  g.hop = h.stft->hop;
  g.frames = h.stft->frames;
  g.original_length = h.stft->original_length;
  g.padded_length = h.stft->padded_length;
  g.values.resize(g.window_len * g.frames);
  const std::size_t plane = g.values.size();
  for (std::size_t i = 0; i < plane; ++i) g.values[i] = Complex(buf[i], buf[plane + i]);
  return istft(g);
}

// Unscaled item of the requested representation.
void encode_item(const IqWaveform& w, Representation rep, std::size_t window_len, float* dst) {
  if (rep == Representation::raw) {
    for (const auto& s : w.samples) {
      *dst++ = static_cast<float>(s.real());
      *dst++ = static_cast<float>(s.imag());
    }
    return;
  }
  const auto g = stft(w, window_len);
  const std::size_t plane = g.values.size();
  for (std::size_t i = 0; i < plane; ++i) {
    dst[i] = static_cast<float>(g.values[i].real());
    dst[plane + i] = static_cast<float>(g.values[i].imag());
  }
}

ContainerHeader target_header(const ContainerHeader& src, Representation target) {
  ContainerHeader h;
  h.spec = src.spec;
  h.count = src.count;
  h.representation = target;
  if (target == Representation::stft) h.stft = stft_meta(src.spec);
  return h;
}

std::vector<float> convert_items(const ContainerHeader& src, const ContainerHeader& dst, std::span<const float> items) {
  const std::size_t in_per = src.item_floats();
  const std::size_t out_per = dst.item_floats();
  const std::size_t n = items.size() / in_per;
  std::vector<float> out(n * out_per);
  parallel_for(n, [&](std::size_t i) {
    const auto w = decode_item(src, items.subspan(i * in_per, in_per));
    encode_item(w, dst.representation, dst.spec.symbol_len, out.data() + i * out_per);
  });
  return out;
}

}  // namespace

std::vector<IqWaveform> to_waveforms(const Dataset& dataset) {
  const auto& h = dataset.header;
  const std::size_t per = h.item_floats();
  if (dataset.data.size() != h.count * per) throw Error(ErrorCode::dimension_mismatch, "dataset payload size mismatch");
  std::vector<IqWaveform> out(h.count);
  const std::span<const float> data(dataset.data);
  parallel_for(h.count, [&](std::size_t i) { out[i] = decode_item(h, data.subspan(i * per, per)); });
  return out;
}

Dataset convert(const Dataset& dataset, Representation target, std::optional<ScalingMode> scaling) {
  Dataset out{target_header(dataset.header, target), {}};
  out.data = convert_items(dataset.header, out.header, dataset.data);
  if (scaling) {
    ScalingFit fit(*scaling, out.header.layout());
    fit.update(std::span<const float>(out.data));
    out.header.scaling = fit.finish();
    apply_scaling(std::span<float>(out.data), out.header.layout(), *out.header.scaling);
  }
  return out;
}

void convert_file(const std::filesystem::path& in, const std::filesystem::path& out, Representation target,
                  std::optional<ScalingMode> scaling) {
  ContainerReader reader(in);
  const auto& src = reader.header();
  ContainerHeader dst = target_header(src, target);
  constexpr std::uint64_t chunk = kGenerateChunk;
  if (scaling) {
    ScalingFit fit(*scaling, dst.layout());
    for (std::uint64_t first = 0; first < src.count; first += chunk) {
      const auto items = reader.read(first, std::min(chunk, src.count - first));
      fit.update(std::span<const float>(convert_items(src, dst, items)));
    }
    dst.scaling = fit.finish();
  }
  ContainerWriter writer(out, dst);
  for (std::uint64_t first = 0; first < src.count; first += chunk) {
    const auto items = reader.read(first, std::min(chunk, src.count - first));
    auto converted = convert_items(src, dst, items);
    if (dst.scaling) apply_scaling(std::span<float>(converted), dst.layout(), *dst.scaling);
    writer.write(converted);
  }
  writer.close();
}

}  // namespace ofdmgen
