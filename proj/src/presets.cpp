#include <string>

#include "ofdmgen/dataset.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/serialize.hpp"

namespace ofdmgen {

namespace {

WaveformSpec base(int symbol_len, AllocClass alloc, int mod_order, double evm_db) {
  WaveformSpec s;
  s.symbol_len = symbol_len;
  s.alloc_class = alloc;
  s.mod_order = mod_order;
  s.target_evm_db = evm_db;
  return s;
}

std::vector<ExperimentPreset> build_presets() {
  std::vector<ExperimentPreset> out;

  ExperimentPreset complexity{"complexity", {}};
  for (int len : {128, 256, 512})
    for (auto alloc : {AllocClass::small, AllocClass::medium, AllocClass::large})
      complexity.specs.emplace_back("complexity-" + std::to_string(len) + "-" + std::string(to_string(alloc)),
                                    base(len, alloc, 16, -25.0));
  out.push_back(std::move(complexity));

  ExperimentPreset modorder{"modorder", {}};
  for (int m : {4, 16, 32, 64})
    modorder.specs.emplace_back("modorder-" + std::to_string(m), base(128, AllocClass::medium, m, -25.0));
  out.push_back(std::move(modorder));

  // Noise is added before the channel, at a level chosen per profile.
  ExperimentPreset channel{"channel", {}};
  struct Row {
    const char* name;
    ChannelProfile profile;
    double doppler;
    double evm;
  };
  for (const Row& r : {Row{"channel-epa5", ChannelProfile::EPA, 5.0, -30.0},
                       Row{"channel-eva70", ChannelProfile::EVA, 70.0, -40.0},
                       Row{"channel-etu300", ChannelProfile::ETU, 300.0, -50.0}}) {
    auto s = base(512, AllocClass::medium, 16, r.evm);
    s.pilot_enabled = true;
    s.pilot_position = 3;
    s.channel = ChannelSpec{r.profile, r.doppler, 7.68e6, 0};
    channel.specs.emplace_back(r.name, s);
  }
  out.push_back(std::move(channel));
  return out;
}

}  // namespace

const std::vector<ExperimentPreset>& experiment_presets() {
  static const std::vector<ExperimentPreset> presets = build_presets();
  return presets;
}

WaveformSpec preset(std::string_view name) {
  for (const auto& group : experiment_presets())
    for (const auto& [n, spec] : group.specs)
      if (n == name) return spec;
  throw Error(ErrorCode::invalid_argument, "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& group : experiment_presets())
    for (const auto& entry : group.specs) names.push_back(entry.first);
  return names;
}

}  // namespace ofdmgen
