#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ofdmgen/channel.hpp"
#include "ofdmgen/metrics.hpp"

namespace ofdmgen {

struct EvalOptions {
  MultitaperConfig multitaper;
  /// Waveforms per set that enter the median cross-correlation profile
  /// (the per-waveform maxima always use the whole set).
  std::size_t profile_limit = 1024;
  int coherence_bins = 50;
};

/// QAM symbols recovered from one waveform: demodulated, equalized with the
/// pilot estimate when the spec has a channel, pilot row and flagged
/// subcarriers removed.
struct RecoveredSymbols {
  ComplexVector data;
  std::optional<FreqResponse> response;  // pilot estimate, when a pilot exists
  std::size_t flagged = 0;
};

RecoveredSymbols recover_symbols(const IqWaveform& waveform, const WaveformSpec& spec);

/// All per-set statistics entering the report.
struct SetSummary {
  std::size_t count = 0;
  Psd median_psd;
  std::vector<double> evm_db;  // per waveform
  double median_evm_db = 0.0;
  double cp_max_median = 0.0;  // R of the relative-error formula
  CpCorrelation median_cp_profile;
  ConstellationHistogram histogram;
  std::vector<double> coherence_bw_hz;  // per waveform, channel specs only
  std::size_t flagged_subcarriers = 0;
};

SetSummary summarize_set(std::span<const IqWaveform> set, const WaveformSpec& spec, const EvalOptions& options = {});

struct CoherenceHistogram {
  std::vector<double> edges_hz;  // bins + 1 edges
  std::vector<std::uint64_t> generated;
  std::vector<std::uint64_t> target;
  double median_generated_hz = 0.0;
  double median_target_hz = 0.0;
};

struct EvalReport {
  WaveformSpec spec;
  MultitaperConfig multitaper;
  double psd_distance = 0.0;
  double evm_db = 0.0;         // generated set median
  double evm_db_target = 0.0;  // target set median
  double cp_r_generated = 0.0;
  double cp_r_target = 0.0;
  double cp_relerr_pct = 0.0;
  SetSummary generated;
  SetSummary target;
  std::optional<CoherenceHistogram> coherence;
};

/// Runs the full evaluation suite for a generated set against a target set.
EvalReport evaluate(std::span<const IqWaveform> generated, std::span<const IqWaveform> target,
                    const WaveformSpec& spec, const EvalOptions& options = {});

}  // namespace ofdmgen
