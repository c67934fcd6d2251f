#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cstring>
#include <iterator>
#include <limits>

#include <unistd.h>

#include <json.hpp>

#include "ofdmgen/container.hpp"
#include "ofdmgen/dataset.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/evaluate.hpp"
#include "ofdmgen/parallel.hpp"
#include "ofdmgen/serialize.hpp"

using namespace ofdmgen;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ofdmgen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

WaveformSpec small_spec() {
  WaveformSpec s;
  s.symbol_len = 128;
  s.alloc_class = AllocClass::small;
  return s;
}

}  // namespace

TEST_CASE("spec JSON: round trip including channel and noiseless EVM") {
  WaveformSpec s = preset("channel-eva70");
  s.seed = 12345;
  const nlohmann::json j = s;
  CHECK(j.at("cp_fraction") == nlohmann::json::array({1, 4}));
  CHECK(j.at("channel").at("profile") == "EVA");
  CHECK(j.get<WaveformSpec>() == s);

  WaveformSpec q = small_spec();
  q.target_evm_db = -std::numeric_limits<double>::infinity();
  q.occupied_count = 12;
  const nlohmann::json jq = q;
  CHECK(jq.at("target_evm_db").is_null());
  CHECK(jq.get<WaveformSpec>() == q);

  auto bad = jq;
  bad["mod_order"] = 8;
  CHECK_THROWS_AS(bad.get<WaveformSpec>().validate(), Error);
}

TEST_CASE("header: serialize/parse round trip") {
  ContainerHeader h;
  h.spec = small_spec();
  h.spec.seed = 9;
  h.count = 17;
  h.representation = Representation::stft;
  h.stft = StftMeta{128, 32, 33, 960, 1024};
  h.scaling = ScalingParams{ScalingMode::featurewise, std::vector<double>(33, -1.5), std::vector<double>(33, 2.0)};
  const auto text = serialize_header(h);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("format_version") == 1);
  CHECK(j.at("count") == 17);
  CHECK(j.at("seed") == 9);
  CHECK(j.at("representation") == "stft");
  CHECK(j.at("item_shape") == nlohmann::json::array({2, 128, 33}));
  CHECK(parse_header(text) == h);
  CHECK(h.item_floats() == 2 * 128 * 33);

  ContainerHeader raw;
  raw.spec = small_spec();
  raw.count = 1;
  CHECK(raw.item_shape() == std::vector<std::size_t>{960, 2});
  CHECK(nlohmann::json::parse(serialize_header(raw)).at("scaling").is_null());
}

TEST_CASE("header: malformed input is a format error") {
  try {
    parse_header("{not json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::format);
  }
  ContainerHeader h;
  h.spec = small_spec();
  h.count = 2;
  auto j = nlohmann::json::parse(serialize_header(h));
  j["representation"] = "wavelet";
  CHECK_THROWS_AS(parse_header(j.dump()), Error);
  j = nlohmann::json::parse(serialize_header(h));
  j["representation"] = "stft";  // missing stft metadata
  CHECK_THROWS_AS(parse_header(j.dump()), Error);
}

TEST_CASE("container: write/read identity and partial reads") {
  TempDir tmp;
  const auto ds = generate_dataset(small_spec(), 10, 77);
  write_container(tmp.path / "a.ofdg", ds);
  const auto back = read_container(tmp.path / "a.ofdg");
  CHECK(back.header == ds.header);
  CHECK(back.data == ds.data);
  ContainerReader reader(tmp.path / "a.ofdg");
  const auto part = reader.read(3, 4);
  CHECK(part == std::vector<float>(ds.data.begin() + 3 * 1920, ds.data.begin() + 7 * 1920));
  CHECK_THROWS_AS(reader.read(8, 3), Error);

  const auto bytes = slurp(tmp.path / "a.ofdg");
  CHECK(bytes.substr(0, 4) == "OFDG");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  std::uint64_t header_len = 0;
  for (int i = 0; i < 8; ++i) header_len |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
  CHECK(bytes.size() == 16 + header_len + 10 * 1920 * 4);
  float first;
  std::memcpy(&first, bytes.data() + 16 + header_len, 4);
  CHECK(first == ds.data[0]);
}

TEST_CASE("container: corrupted files are rejected") {
  TempDir tmp;
  const auto ds = generate_dataset(small_spec(), 3, 1);
  write_container(tmp.path / "ok.ofdg", ds);
  const auto bytes = slurp(tmp.path / "ok.ofdg");

  auto expect_format = [&](const std::string& data) {
    dump(tmp.path / "bad.ofdg", data);
    try {
      read_container(tmp.path / "bad.ofdg");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::format);
    }
  };
  std::string b = bytes;
  b[0] = 'X';
  expect_format(b);
  b = bytes;
  b[4] = 2;
  expect_format(b);
  expect_format(bytes.substr(0, bytes.size() - 5));
  expect_format(bytes + "xyz!");
  expect_format(bytes.substr(0, 10));
  CHECK_THROWS_AS(read_container(tmp.path / "missing.ofdg"), Error);
}

TEST_CASE("container: writer enforces the declared count") {
  TempDir tmp;
  ContainerHeader h;
  h.spec = small_spec();
  h.count = 2;
  ContainerWriter w(tmp.path / "c.ofdg", h);
  w.write(std::vector<float>(1920, 0.0f));
  CHECK_THROWS_AS(w.write(std::vector<float>(1919, 0.0f)), Error);
  CHECK_THROWS_AS(w.close(), Error);
}

TEST_CASE("generation: streamed file equals the in-memory dataset") {
  TempDir tmp;
  const auto spec = preset("complexity-128-medium");
  generate_dataset_file(spec, 300, 5, tmp.path / "s.ofdg");  // spans two chunks
  const auto mem = generate_dataset(spec, 300, 5);
  const auto file = read_container(tmp.path / "s.ofdg");
  CHECK(file.header == mem.header);
  CHECK(file.data == mem.data);
  CHECK(file.header.spec.seed == 5);
  CHECK(generate_items(mem.header.spec, 120, 2) ==
        std::vector<float>(mem.data.begin() + 120 * 1920, mem.data.begin() + 122 * 1920));
}

TEST_CASE("generation: byte-identical across runs and thread counts") {
  TempDir tmp;
  const auto spec = preset("channel-etu300");
  set_thread_count(1);
  generate_dataset_file(spec, 40, 11, tmp.path / "t1.ofdg");
  set_thread_count(4);
  generate_dataset_file(spec, 40, 11, tmp.path / "t4.ofdg");
  generate_dataset_file(spec, 40, 11, tmp.path / "t4b.ofdg");
  set_thread_count(0);
  const auto a = slurp(tmp.path / "t1.ofdg");
  CHECK(a == slurp(tmp.path / "t4.ofdg"));
  CHECK(a == slurp(tmp.path / "t4b.ofdg"));
  generate_dataset_file(spec, 40, 12, tmp.path / "other.ofdg");
  CHECK(a != slurp(tmp.path / "other.ofdg"));
}

TEST_CASE("generation: invalid requests") {
  CHECK_THROWS_AS(generate_dataset(small_spec(), 0, 1), Error);
  CHECK_THROWS_AS(preset("complexity-1024-small"), Error);
}

TEST_CASE("convert: raw -> stft -> raw within float precision") {
  const auto ds = generate_dataset(preset("complexity-256-medium"), 16, 3);
  const auto stft_ds = convert(ds, Representation::stft, std::nullopt);
  CHECK(stft_ds.header.item_shape() == std::vector<std::size_t>{2, 256, 33});
  CHECK(stft_ds.header.stft->padded_length == 2048);
  const auto back = convert(stft_ds, Representation::raw, std::nullopt);
  double e = 0.0;
  for (std::size_t i = 0; i < ds.data.size(); ++i) e = std::max(e, std::abs(double(back.data[i]) - ds.data[i]));
  CHECK(e < 1e-6);
}

TEST_CASE("convert: scaled round trip within 1e-6 in both modes") {
  const auto ds = generate_dataset(preset("complexity-512-large"), 8, 4);
  for (auto mode : {ScalingMode::global, ScalingMode::featurewise}) {
    for (auto rep : {Representation::raw, Representation::stft}) {
      const auto scaled = convert(ds, rep, mode);
      REQUIRE(scaled.header.scaling.has_value());
      for (float v : scaled.data) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
      }
      const auto back = to_waveforms(scaled);
      double e = 0.0;
      for (std::size_t n = 0; n < back.size(); ++n)
        for (std::size_t i = 0; i < back[n].size(); ++i) {
          e = std::max(e, std::abs(back[n].samples[i].real() - ds.data[n * 7680 + 2 * i]));
          e = std::max(e, std::abs(back[n].samples[i].imag() - ds.data[n * 7680 + 2 * i + 1]));
        }
      CHECK(e < 1e-6);
    }
  }
}

TEST_CASE("convert_file: matches the in-memory conversion") {
  TempDir tmp;
  const auto spec = preset("complexity-128-small");
  generate_dataset_file(spec, 300, 8, tmp.path / "raw.ofdg");
  convert_file(tmp.path / "raw.ofdg", tmp.path / "stft.ofdg", Representation::stft, ScalingMode::featurewise);
  const auto file = read_container(tmp.path / "stft.ofdg");
  const auto mem = convert(read_container(tmp.path / "raw.ofdg"), Representation::stft, ScalingMode::featurewise);
  CHECK(file.header == mem.header);
  CHECK(file.data == mem.data);
}

TEST_CASE("presets: names and configurations") {
  const auto names = preset_names();
  CHECK(names.size() == 16);
  CHECK(preset("complexity-512-large").symbol_len == 512);
  CHECK(preset("modorder-32").mod_order == 32);
  const auto ch = preset("channel-etu300");
  REQUIRE(ch.channel.has_value());
  CHECK(ch.channel->profile == ChannelProfile::ETU);
  CHECK(ch.channel->max_doppler_hz == 300.0);
  CHECK(ch.pilot_enabled);
  CHECK(ch.pilot_position == 3);
  for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
}

TEST_CASE("size arithmetic: raw item bytes per configuration") {
  for (int len : {128, 256, 512}) {
    ContainerHeader h;
    h.spec = small_spec();
    h.spec.symbol_len = len;
    h.count = 1;
    CHECK(h.item_floats() * 4 == static_cast<std::size_t>(len) * 15 / 2 * 8);
  }
}

TEST_CASE("evaluate: identical sets and report serialization") {
  TempDir tmp;
  const auto spec = preset("complexity-128-medium");
  std::vector<IqWaveform> gen, tgt;
  for (std::uint64_t i = 0; i < 24; ++i) gen.push_back(generate_waveform(spec, i).waveform);
  WaveformSpec other = spec;
  other.seed = 1;
  for (std::uint64_t i = 0; i < 24; ++i) tgt.push_back(generate_waveform(other, i).waveform);

  const auto self = evaluate(gen, gen, spec);
  CHECK(self.psd_distance == 0.0);
  CHECK(self.cp_relerr_pct == 0.0);

  const auto r = evaluate(gen, tgt, spec);
  CHECK(r.psd_distance > 0.0);
  CHECK(r.evm_db == doctest::Approx(-25.0).epsilon(0.04));
  CHECK(!r.coherence.has_value());
  CHECK(r.generated.histogram.binned() + r.generated.histogram.dropped == 24u * 5 * 38 + 24u * 38);

  const auto j = report_to_json(r);
  for (const char* key : {"spec", "psd_distance", "evm_db", "cp_relerr_pct", "psd", "constellation", "cp_profile"})
    CHECK(j.contains(key));
  write_report_csv(j, tmp.path);
  for (const char* f : {"psd.csv", "constellation_generated.csv", "constellation_target.csv", "cp_profile.csv"})
    CHECK(fs::exists(tmp.path / f));
  CHECK(!fs::exists(tmp.path / "coherence_bandwidth.csv"));

  std::vector<IqWaveform> wrong{generate_waveform(preset("complexity-256-medium"), 0).waveform};
  CHECK_THROWS_AS(evaluate(wrong, tgt, spec), Error);
}

TEST_CASE("evaluate: channel datasets report coherence bandwidth") {
  TempDir tmp;
  const auto spec = preset("channel-epa5");
  std::vector<IqWaveform> set;
  for (std::uint64_t i = 0; i < 8; ++i) set.push_back(generate_waveform(spec, i).waveform);
  const auto r = evaluate(set, set, spec);
  REQUIRE(r.coherence.has_value());
  CHECK(r.coherence->edges_hz.size() == 51);
  CHECK(r.generated.coherence_bw_hz.size() == 8);
  CHECK(r.evm_db < -20.0);
  write_report_csv(report_to_json(r), tmp.path);
  CHECK(fs::exists(tmp.path / "coherence_bandwidth.csv"));
}
