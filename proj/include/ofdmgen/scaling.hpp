#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ofdmgen {

enum class ScalingMode { global, featurewise };

ScalingMode parse_scaling_mode(std::string_view name);
std::string_view to_string(ScalingMode mode);

/// Maps element index within one dataset item to its scaling feature:
/// feature = (element / inner) % n_features.
///
/// Raw items are interleaved I/Q, so a feature is one time step (both
/// components). STFT items are [re|im][bin][frame], so a feature is one
/// frame across both channels and all bins.
struct FeatureLayout {
  std::size_t item_size = 0;
  std::size_t inner = 1;
  std::size_t n_features = 1;

  static FeatureLayout raw(std::size_t length) { return {2 * length, 2, length}; }
  static FeatureLayout stft(std::size_t bins, std::size_t frames) { return {2 * bins * frames, 1, frames}; }

  std::size_t feature_of(std::size_t element) const { return (element / inner) % n_features; }
};

/// Min-max statistics. Global mode keeps a single (min, max) pair.
struct ScalingParams {
  ScalingMode mode = ScalingMode::global;
  std::vector<double> mins;
  std::vector<double> maxs;

  /// Features with max == min; they scale to 0 and unscale to the constant.
  std::size_t degenerate_count() const;
  bool operator==(const ScalingParams&) const = default;
};

/// Accumulates dataset-wide statistics over one or more chunks of whole items.
class ScalingFit {
 public:
  ScalingFit(ScalingMode mode, FeatureLayout layout);

  void update(std::span<const float> items);
  void update(std::span<const double> items);
  ScalingParams finish() const;

 private:
  template <typename T>
  void update_impl(std::span<const T> items);

  ScalingMode mode_;
  FeatureLayout layout_;
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// In place: y = 2 (x - min) / (max - min) - 1.
void apply_scaling(std::span<double> items, const FeatureLayout& layout, const ScalingParams& params);
void apply_scaling(std::span<float> items, const FeatureLayout& layout, const ScalingParams& params);

/// Exact inverse of apply_scaling.
void unscale(std::span<double> items, const FeatureLayout& layout, const ScalingParams& params);
void unscale(std::span<float> items, const FeatureLayout& layout, const ScalingParams& params);

/// Fits statistics on `items` (unless `fixed` is supplied), scales in place
/// and returns the parameters used.
ScalingParams scale(std::span<double> items, const FeatureLayout& layout, ScalingMode mode,
                    const ScalingParams* fixed = nullptr);

}  // namespace ofdmgen
