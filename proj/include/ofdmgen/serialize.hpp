#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "ofdmgen/evaluate.hpp"
#include "ofdmgen/scaling.hpp"
#include "ofdmgen/types.hpp"

namespace ofdmgen {

std::string_view to_string(AllocClass cls);
AllocClass parse_alloc_class(std::string_view name);

// JSON forms used in container headers, spec files and reports. A noiseless
// target EVM is written as null.
void to_json(nlohmann::json& j, const ChannelSpec& c);
void from_json(const nlohmann::json& j, ChannelSpec& c);
void to_json(nlohmann::json& j, const WaveformSpec& s);
void from_json(const nlohmann::json& j, WaveformSpec& s);
void to_json(nlohmann::json& j, const ScalingParams& p);
void from_json(const nlohmann::json& j, ScalingParams& p);

/// Full report, including median PSDs, histograms and median
/// cross-correlation profiles so `report` can render CSVs later.
nlohmann::json report_to_json(const EvalReport& report);

/// Writes psd.csv, constellation_generated.csv, constellation_target.csv,
/// cp_profile.csv and, for channel datasets, coherence_bandwidth.csv.
void write_report_csv(const nlohmann::json& report, const std::filesystem::path& dir);

}  // namespace ofdmgen
