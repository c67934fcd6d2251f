#include "ofdmgen/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

#include "ofdmgen/channel.hpp"
#include "ofdmgen/error.hpp"

namespace ofdmgen {

using nlohmann::json;

std::string_view to_string(AllocClass cls) {
  switch (cls) {
    case AllocClass::small: return "small";
    case AllocClass::medium: return "medium";
    case AllocClass::large: return "large";
  }
  return "?";
}

AllocClass parse_alloc_class(std::string_view name) {
  if (name == "small") return AllocClass::small;
  if (name == "medium") return AllocClass::medium;
  if (name == "large") return AllocClass::large;
  throw Error(ErrorCode::invalid_argument, "unknown allocation class '" + std::string(name) + "'");
}

void to_json(json& j, const ChannelSpec& c) {
  j = json{{"profile", std::string(to_string(c.profile))},
           {"max_doppler_hz", c.max_doppler_hz},
           {"sample_rate_hz", c.sample_rate_hz},
           {"seed", c.seed}};
}

void from_json(const json& j, ChannelSpec& c) {
  c = ChannelSpec{};
  c.profile = parse_channel_profile(j.at("profile").get<std::string>());
  c.max_doppler_hz = j.value("max_doppler_hz", c.max_doppler_hz);
  c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
  c.seed = j.value("seed", c.seed);
}

void to_json(json& j, const WaveformSpec& s) {
  j = json{{"symbol_len", s.symbol_len},
           {"n_symbols", s.n_symbols},
           {"cp_fraction", json::array({s.cp_num, s.cp_den})},
           {"alloc_class", std::string(to_string(s.alloc_class))},
           {"occupied_count", s.occupied_count ? json(*s.occupied_count) : json(nullptr)},
           {"mod_order", s.mod_order},
           {"target_evm_db", s.noiseless() ? json(nullptr) : json(s.target_evm_db)},
           {"pilot_enabled", s.pilot_enabled},
           {"pilot_position", s.pilot_position},
           {"channel", s.channel ? json(*s.channel) : json(nullptr)},
           {"seed", s.seed}};
}

void from_json(const json& j, WaveformSpec& s) {
  if (!j.is_object()) throw Error(ErrorCode::format, "waveform spec must be a JSON object");
  s = WaveformSpec{};
  s.symbol_len = j.value("symbol_len", s.symbol_len);
  s.n_symbols = j.value("n_symbols", s.n_symbols);
  if (j.contains("cp_fraction")) {
    const auto& f = j.at("cp_fraction");
    if (!f.is_array() || f.size() != 2) throw Error(ErrorCode::format, "cp_fraction must be [numerator, denominator]");
    s.cp_num = f[0].get<int>();
    s.cp_den = f[1].get<int>();
  }
  if (j.contains("alloc_class")) s.alloc_class = parse_alloc_class(j.at("alloc_class").get<std::string>());
  if (j.contains("occupied_count") && !j.at("occupied_count").is_null())
    s.occupied_count = j.at("occupied_count").get<int>();
  s.mod_order = j.value("mod_order", s.mod_order);
  if (j.contains("target_evm_db")) {
    const auto& e = j.at("target_evm_db");
    s.target_evm_db = e.is_null() ? -std::numeric_limits<double>::infinity() : e.get<double>();
  }
  s.pilot_enabled = j.value("pilot_enabled", s.pilot_enabled);
  s.pilot_position = j.value("pilot_position", s.pilot_position);
  if (j.contains("channel") && !j.at("channel").is_null()) s.channel = j.at("channel").get<ChannelSpec>();
  s.seed = j.value("seed", s.seed);
}

void to_json(json& j, const ScalingParams& p) {
  j = json{{"mode", std::string(to_string(p.mode))}, {"mins", p.mins}, {"maxs", p.maxs}};
}

void from_json(const json& j, ScalingParams& p) {
  p.mode = parse_scaling_mode(j.at("mode").get<std::string>());
  p.mins = j.at("mins").get<std::vector<double>>();
  p.maxs = j.at("maxs").get<std::vector<double>>();
  if (p.mins.size() != p.maxs.size()) throw Error(ErrorCode::format, "scaling mins/maxs differ in length");
}

namespace {

json histogram_json(const ConstellationHistogram& h) {
  return json{{"counts", h.counts}, {"dropped", h.dropped}, {"binned", h.binned()}};
}

json profile_json(const CpCorrelation& c) { return json(c.profiles); }

}  // namespace

json report_to_json(const EvalReport& r) {
  json j;
  j["spec"] = r.spec;
  j["multitaper"] = {{"nw", r.multitaper.nw}, {"tapers", r.multitaper.tapers}};
  j["counts"] = {{"generated", r.generated.count}, {"target", r.target.count}};
  j["psd_distance"] = r.psd_distance;
  j["evm_db"] = r.evm_db;
  j["evm_db_target"] = r.evm_db_target;
  j["cp_r_generated"] = r.cp_r_generated;
  j["cp_r_target"] = r.cp_r_target;
  j["cp_relerr_pct"] = r.cp_relerr_pct;
  j["flagged_subcarriers"] = {{"generated", r.generated.flagged_subcarriers},
                              {"target", r.target.flagged_subcarriers}};
  j["psd"] = {{"frequency_start", -0.5},
              {"df", r.target.median_psd.df()},
              {"generated", r.generated.median_psd.values},
              {"target", r.target.median_psd.values}};
  j["constellation"] = {{"bins", ConstellationHistogram::kBins},
                        {"extent", ConstellationHistogram::kExtent},
                        {"generated", histogram_json(r.generated.histogram)},
                        {"target", histogram_json(r.target.histogram)}};
  j["cp_profile"] = {{"symbol_len", r.target.median_cp_profile.symbol_len},
                     {"cp_len", r.target.median_cp_profile.cp_len},
                     {"expected_relative_lag", r.target.median_cp_profile.expected_relative_lag()},
                     {"generated", profile_json(r.generated.median_cp_profile)},
                     {"target", profile_json(r.target.median_cp_profile)}};
  if (r.coherence) {
    j["coherence_bandwidth"] = {{"edges_hz", r.coherence->edges_hz},
                                {"generated", r.coherence->generated},
                                {"target", r.coherence->target},
                                {"median_generated_hz", r.coherence->median_generated_hz},
                                {"median_target_hz", r.coherence->median_target_hz}};
  } else {
    j["coherence_bandwidth"] = nullptr;
  }
  return j;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void write_histogram_csv(const json& hist, int bins, double extent, const std::filesystem::path& path) {
  const auto counts = hist.at("counts").get<std::vector<std::uint64_t>>();
  if (counts.size() != static_cast<std::size_t>(bins) * bins)
    throw Error(ErrorCode::format, "constellation histogram has the wrong size");
  auto out = open_csv(path);
  const double width = 2.0 * extent / bins;
  out << "i_center\\q_center";
  for (int q = 0; q < bins; ++q) out << ',' << (-extent + (q + 0.5) * width);
  out << '\n';
  for (int i = 0; i < bins; ++i) {
    out << (-extent + (i + 0.5) * width);
    for (int q = 0; q < bins; ++q) out << ',' << counts[i * bins + q];
    out << '\n';
  }
}

}  // namespace

void write_report_csv(const json& report, const std::filesystem::path& dir) {
  try {
    std::filesystem::create_directories(dir);
    {
      const auto& psd = report.at("psd");
      const auto gen = psd.at("generated").get<std::vector<double>>();
      const auto tgt = psd.at("target").get<std::vector<double>>();
      const double f0 = psd.at("frequency_start").get<double>();
      const double df = psd.at("df").get<double>();
      auto out = open_csv(dir / "psd.csv");
      out << "frequency,target,generated\n";
      for (std::size_t i = 0; i < tgt.size(); ++i) out << f0 + i * df << ',' << tgt[i] << ',' << gen.at(i) << '\n';
    }
    {
      const auto& c = report.at("constellation");
      const int bins = c.at("bins").get<int>();
      const double extent = c.at("extent").get<double>();
      write_histogram_csv(c.at("generated"), bins, extent, dir / "constellation_generated.csv");
      write_histogram_csv(c.at("target"), bins, extent, dir / "constellation_target.csv");
    }
    {
      const auto& p = report.at("cp_profile");
      const auto n = p.at("symbol_len").get<long long>();
      const auto gen = p.at("generated").get<std::vector<std::vector<double>>>();
      const auto tgt = p.at("target").get<std::vector<std::vector<double>>>();
      auto out = open_csv(dir / "cp_profile.csv");
      out << "symbol,lag,relative_lag,target,generated\n";
      for (std::size_t s = 0; s < tgt.size(); ++s)
        for (std::size_t l = 0; l < tgt[s].size(); ++l)
          out << s << ',' << l << ',' << static_cast<long long>(l) - static_cast<long long>(s) * n << ','
              << tgt[s][l] << ',' << gen.at(s).at(l) << '\n';
    }
    if (report.contains("coherence_bandwidth") && !report.at("coherence_bandwidth").is_null()) {
      const auto& c = report.at("coherence_bandwidth");
      const auto edges = c.at("edges_hz").get<std::vector<double>>();
      const auto gen = c.at("generated").get<std::vector<std::uint64_t>>();
      const auto tgt = c.at("target").get<std::vector<std::uint64_t>>();
      auto out = open_csv(dir / "coherence_bandwidth.csv");
      out << "bin_low_hz,bin_high_hz,target,generated\n";
      for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        out << edges[b] << ',' << edges[b + 1] << ',' << tgt.at(b) << ',' << gen.at(b) << '\n';
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("malformed report: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::io, e.what());
  }
}

}  // namespace ofdmgen
