#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ofdmgen/error.hpp"
#include "ofdmgen/ofdm.hpp"
#include "ofdmgen/scaling.hpp"
#include "ofdmgen/stft.hpp"
#include "oracles.hpp"

using namespace ofdmgen;

namespace {

IqWaveform noise_waveform(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, 0, Stream::test);
  IqWaveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = rng.complex_normal();
  return w;
}

double max_diff(const IqWaveform& a, const IqWaveform& b) {
  REQUIRE(a.size() == b.size());
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.samples[i] - b.samples[i]));
  return e;
}

// Frame-by-frame evaluation straight from the definition.
StftGrid naive_stft(const IqWaveform& w, std::size_t wl) {
  std::size_t padded = 1;
  while (padded < w.size()) padded <<= 1;
  const std::size_t hop = wl / 4;
  std::vector<Complex> ext(padded + wl, Complex{});
  std::copy(w.samples.begin(), w.samples.end(), ext.begin() + wl / 2);
  StftGrid g;
  g.window_len = wl;
  g.hop = hop;
  g.frames = padded / hop + 1;
  g.original_length = w.size();
  g.padded_length = padded;
  g.values.resize(wl * g.frames);
  for (std::size_t t = 0; t < g.frames; ++t) {
    std::vector<Complex> seg(wl);
    for (std::size_t i = 0; i < wl; ++i)
      seg[i] = ext[t * hop + i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / wl));
    auto spec = oracle::dft(seg, -1);
    for (std::size_t b = 0; b < wl; ++b) g.at(b, t) = spec[(b + wl / 2) % wl] * std::sqrt(static_cast<double>(wl));
  }
  return g;
}

}  // namespace

TEST_CASE("hann_window: periodic definition") {
  const auto w = hann_window(8);
  REQUIRE(w.size() == 8);
  CHECK(w[0] == 0.0);
  CHECK(w[4] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(w[7]));
}

TEST_CASE("stft: shape for every symbol length") {
  for (int len : {128, 256, 512}) {
    WaveformSpec spec;
    spec.symbol_len = len;
    const auto w = generate_waveform(spec, 0).waveform;
    const auto g = stft(w, len);
    CHECK(g.bins() == static_cast<std::size_t>(len));
    CHECK(g.frames == 33);
    CHECK(g.hop == static_cast<std::size_t>(len / 4));
    CHECK(g.padded_length == static_cast<std::size_t>(8 * len));
    CHECK(g.original_length == w.size());
    CHECK(stft_frame_count(w.size(), len) == 33);
  }
}

TEST_CASE("stft: matches the direct per-frame DFT") {
  const auto w = noise_waveform(960, 3);
  const auto fast = stft(w, 128);
  const auto slow = naive_stft(w, 128);
  REQUIRE(fast.values.size() == slow.values.size());
  double e = 0.0;
  for (std::size_t i = 0; i < fast.values.size(); ++i) e = std::max(e, std::abs(fast.values[i] - slow.values[i]));
  CHECK(e < 1e-10);
}

TEST_CASE("stft: DC input lands in the center row") {
  IqWaveform w;
  w.samples.assign(1024, Complex(1.0, 0.0));
  const auto g = stft(w, 128);
  const std::size_t mid = 16;  // a frame fully inside the signal
  CHECK(std::abs(g.at(64, mid) - Complex(64.0, 0.0)) < 1e-10);  // sum of the Hann window
  for (std::size_t b = 0; b < 128; ++b)
    if (b < 63 || b > 65) CHECK(std::abs(g.at(b, mid)) < 1e-10);
}

TEST_CASE("stft: zeros in, zeros out") {
  IqWaveform w;
  w.samples.assign(1920, Complex{});
  const auto g = stft(w, 256);
  for (const auto& v : g.values) CHECK(v == Complex{});
  const auto back = istft(g);
  CHECK(back.size() == 1920);
  for (const auto& v : back.samples) CHECK(v == Complex{});
}

TEST_CASE("stft: linearity") {
  const auto a = noise_waveform(1920, 1);
  const auto b = noise_waveform(1920, 2);
  const Complex alpha(0.7, -1.3), beta(-2.0, 0.25);
  IqWaveform mix;
  for (std::size_t i = 0; i < a.size(); ++i) mix.samples.push_back(alpha * a.samples[i] + beta * b.samples[i]);
  const auto ga = stft(a, 256), gb = stft(b, 256), gm = stft(mix, 256);
  double e = 0.0;
  for (std::size_t i = 0; i < gm.values.size(); ++i)
    e = std::max(e, std::abs(gm.values[i] - (alpha * ga.values[i] + beta * gb.values[i])));
  CHECK(e < 1e-10);
}

TEST_CASE("istft: inverts stft for random and OFDM waveforms") {
  for (int len : {128, 256, 512}) {
    const auto w = noise_waveform(static_cast<std::size_t>(len) * 15 / 2, len);
    CHECK(max_diff(istft(stft(w, len)), w) < 1e-10);
    WaveformSpec spec;
    spec.symbol_len = len;
    const auto o = generate_waveform(spec, 9).waveform;
    CHECK(max_diff(istft(stft(o, len)), o) < 1e-10);
  }
}

TEST_CASE("istft: squared Hann at hop W/4 overlap-adds to a constant") {
  for (std::size_t wl : {128, 256, 512}) {
    const auto w = hann_window(wl);
    const std::size_t hop = wl / 4;
    std::vector<double> sum(hop, 0.0);
    for (std::size_t i = 0; i < wl; ++i) sum[i % hop] += w[i] * w[i];
    for (double v : sum) CHECK(std::abs(v - sum[0]) < 1e-12);
    CHECK(sum[0] == doctest::Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("istft: inconsistent metadata") {
  auto g = stft(noise_waveform(960, 4), 128);
  auto bad = g;
  bad.values.pop_back();
  CHECK_THROWS_AS(istft(bad), Error);
  bad = g;
  bad.frames = 32;
  CHECK_THROWS_AS(istft(bad), Error);
  bad = g;
  bad.hop = 48;
  CHECK_THROWS_AS(istft(bad), Error);
  CHECK_THROWS_AS(stft(noise_waveform(960, 4), 30), Error);
}

TEST_CASE("scaling: global mode maps [-2, 2] onto [-1, 1]") {
  std::vector<double> x{-2.0, 0.0, 2.0, 1.0, -1.0, 0.5};
  const auto layout = FeatureLayout::raw(3);
  const auto p = scale(x, layout, ScalingMode::global);
  CHECK(p.mins == std::vector<double>{-2.0});
  CHECK(p.maxs == std::vector<double>{2.0});
  const std::vector<double> expected{-1.0, 0.0, 1.0, 0.5, -0.5, 0.25};
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-15));
}

TEST_CASE("scaling: output range and round trip in both modes") {
  const auto layout = FeatureLayout::stft(8, 5);
  Rng rng(6, 0, Stream::test);
  std::vector<double> data(layout.item_size * 20);
  for (auto& v : data) v = 10.0 * rng.normal() + 3.0;
  for (auto mode : {ScalingMode::global, ScalingMode::featurewise}) {
    auto x = data;
    const auto p = scale(x, layout, mode);
    CHECK(p.mins.size() == (mode == ScalingMode::global ? 1u : 5u));
    CHECK(*std::min_element(x.begin(), x.end()) == doctest::Approx(-1.0));
    CHECK(*std::max_element(x.begin(), x.end()) == doctest::Approx(1.0));
    if (mode == ScalingMode::featurewise) {
      for (std::size_t f = 0; f < 5; ++f) {
        double lo = 2.0, hi = -2.0;
        for (std::size_t e = 0; e < x.size(); ++e)
          if (layout.feature_of(e % layout.item_size) == f) {
            lo = std::min(lo, x[e]);
            hi = std::max(hi, x[e]);
          }
        CHECK(lo == doctest::Approx(-1.0));
        CHECK(hi == doctest::Approx(1.0));
      }
    }
    unscale(x, layout, p);
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(x[i] - data[i]));
    CHECK(e < 1e-12);
  }
}

TEST_CASE("scaling: raw features pair I and Q of one time step") {
  const auto layout = FeatureLayout::raw(4);
  CHECK(layout.feature_of(0) == 0);
  CHECK(layout.feature_of(1) == 0);
  CHECK(layout.feature_of(2) == 1);
  CHECK(layout.feature_of(7) == 3);
  const auto s = FeatureLayout::stft(4, 3);
  CHECK(s.feature_of(0) == 0);
  CHECK(s.feature_of(4) == 1);
  CHECK(s.feature_of(12) == 0);  // imaginary plane, bin 0, frame 0
}

TEST_CASE("scaling: degenerate features map to zero and unscale to the constant") {
  const auto layout = FeatureLayout::raw(2);
  std::vector<double> x{5.0, 5.0, 1.0, 3.0, 5.0, 5.0, -1.0, 0.0};
  const auto orig = x;
  const auto p = scale(x, layout, ScalingMode::featurewise);
  CHECK(p.degenerate_count() == 1);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
  CHECK(x[4] == 0.0);
  unscale(x, layout, p);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(orig[i]).epsilon(1e-15));
}

TEST_CASE("scaling: fixed parameters and mismatches") {
  const auto layout = FeatureLayout::raw(2);
  std::vector<double> fit_data{-4.0, 4.0, 0.0, 2.0};
  const auto p = scale(fit_data, layout, ScalingMode::global);
  std::vector<double> other{0.0, 2.0, 4.0, -4.0};
  CHECK(scale(other, layout, ScalingMode::global, &p) == p);
  CHECK(other == std::vector<double>{0.0, 0.5, 1.0, -1.0});
  CHECK_THROWS_AS(scale(other, layout, ScalingMode::featurewise, &p), Error);
  std::vector<double> ragged{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(scale(ragged, layout, ScalingMode::global), Error);
  std::vector<double> bad{1.0, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(scale(bad, layout, ScalingMode::global), Error);
  CHECK(parse_scaling_mode("featurewise") == ScalingMode::featurewise);
  CHECK_THROWS_AS(parse_scaling_mode("zscore"), Error);
}

TEST_CASE("scaling: statistics accumulate across chunks") {
  const auto layout = FeatureLayout::raw(3);
  std::vector<float> a{1, 2, 3, 4, 5, 6}, b{-1, 9, 0, 0, 7, -8};
  ScalingFit chunked(ScalingMode::featurewise, layout);
  chunked.update(std::span<const float>(a));
  chunked.update(std::span<const float>(b));
  std::vector<float> both(a);
  both.insert(both.end(), b.begin(), b.end());
  ScalingFit whole(ScalingMode::featurewise, layout);
  whole.update(std::span<const float>(both));
  CHECK(chunked.finish() == whole.finish());
  CHECK(whole.finish().mins == std::vector<double>{-1, 0, -8});
  CHECK(whole.finish().maxs == std::vector<double>{9, 4, 7});
}
