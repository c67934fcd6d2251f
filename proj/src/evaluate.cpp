#include "ofdmgen/evaluate.hpp"

#include <algorithm>
#include <mutex>

#include "ofdmgen/error.hpp"
#include "ofdmgen/parallel.hpp"

namespace ofdmgen {

RecoveredSymbols recover_symbols(const IqWaveform& waveform, const WaveformSpec& spec) {
  const auto alloc = build_allocation(spec);
  ResourceGrid grid = demodulate(waveform, spec, alloc);
  RecoveredSymbols out;
  std::vector<int> flagged;
  if (spec.pilot_enabled) {
    const auto known = zadoff_chu_pilot(static_cast<int>(alloc.size()));
    out.response = estimate_freq_response(grid.row(spec.pilot_position), known);
    if (spec.channel) {
      auto eq = equalize(grid, *out.response);
      grid = std::move(eq.grid);
      flagged = std::move(eq.flagged);
    }
  }
  out.flagged = flagged.size();
  const auto rows = data_rows(spec);
  out.data.reserve(rows.size() * grid.n_subcarriers());
  for (int r : rows) {
    const auto row = grid.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      if (!std::binary_search(flagged.begin(), flagged.end(), static_cast<int>(c))) out.data.push_back(row[c]);
  }
  return out;
}

SetSummary summarize_set(std::span<const IqWaveform> set, const WaveformSpec& spec, const EvalOptions& options) {
  if (set.empty()) throw Error(ErrorCode::invalid_argument, "cannot evaluate an empty test set");
  spec.validate();
  const auto constellation = build_constellation(spec.mod_order);
  const std::size_t n = set.size();
  const std::size_t n_profiles = std::min(n, std::max<std::size_t>(options.profile_limit, 1));
  const bool channel = spec.channel.has_value() && spec.pilot_enabled;
  const double spacing = channel ? spec.channel->sample_rate_hz / spec.symbol_len : 0.0;

  SetSummary s;
  s.count = n;
  s.evm_db.resize(n);
  std::vector<Psd> psds(n);
  std::vector<double> cp_max(n);
  std::vector<CpCorrelation> profiles(n_profiles);
  std::vector<std::size_t> flagged(n, 0);
  if (channel) s.coherence_bw_hz.resize(n);
  std::mutex hist_mutex;

  parallel_for(n, [&](std::size_t i) {
    const auto& w = set[i];
    psds[i] = multitaper_psd(w, options.multitaper);
    auto rec = recover_symbols(w, spec);
    s.evm_db[i] = evm_db(rec.data, constellation);
    flagged[i] = rec.flagged;
    auto corr = cp_crosscorr(w, spec);
    cp_max[i] = corr.max;
    if (i < n_profiles) profiles[i] = std::move(corr);
    if (channel) s.coherence_bw_hz[i] = coherence_bandwidth(*rec.response, spacing);
    ConstellationHistogram local;
    local.add(rec.data);
    std::lock_guard lock(hist_mutex);
    s.histogram.merge(local);
  });

  s.median_psd = median_psd(psds);
  s.median_evm_db = median(s.evm_db);
  s.cp_max_median = median(cp_max);
  s.median_cp_profile = median_cp_profile(profiles);
  for (auto f : flagged) s.flagged_subcarriers += f;
  return s;
}

namespace {

CoherenceHistogram coherence_histogram(const SetSummary& gen, const SetSummary& target, const WaveformSpec& spec,
                                       int bins) {
  CoherenceHistogram h;
  const auto alloc = build_allocation(spec);
  const double spacing = spec.channel->sample_rate_hz / spec.symbol_len;
  const double span = static_cast<double>(alloc.size() - 1) * spacing;
  h.edges_hz.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges_hz[b] = span * b / bins;
  auto fill = [&](const std::vector<double>& values) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (double v : values) {
      int b = static_cast<int>(v / span * bins);
      counts[std::clamp(b, 0, bins - 1)]++;
    }
    return counts;
  };
  h.generated = fill(gen.coherence_bw_hz);
  h.target = fill(target.coherence_bw_hz);
  h.median_generated_hz = median(gen.coherence_bw_hz);
  h.median_target_hz = median(target.coherence_bw_hz);
  return h;
}

}  // namespace

EvalReport evaluate(std::span<const IqWaveform> generated, std::span<const IqWaveform> target,
                    const WaveformSpec& spec, const EvalOptions& options) {
  EvalReport r;
  r.spec = spec;
  r.multitaper = options.multitaper;
  r.generated = summarize_set(generated, spec, options);
  r.target = summarize_set(target, spec, options);
  r.psd_distance = psd_geodesic_distance(r.generated.median_psd, r.target.median_psd);
  r.evm_db = r.generated.median_evm_db;
  r.evm_db_target = r.target.median_evm_db;
  r.cp_r_generated = r.generated.cp_max_median;
  r.cp_r_target = r.target.cp_max_median;
  r.cp_relerr_pct = cp_relerr_pct(r.cp_r_generated, r.cp_r_target);
  if (!r.generated.coherence_bw_hz.empty())
    r.coherence = coherence_histogram(r.generated, r.target, spec, options.coherence_bins);
  return r;
}

}  // namespace ofdmgen
