#include "ofdmgen/scaling.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ofdmgen/error.hpp"

namespace ofdmgen {

ScalingMode parse_scaling_mode(std::string_view name) {
  if (name == "global") return ScalingMode::global;
  if (name == "featurewise") return ScalingMode::featurewise;
  throw Error(ErrorCode::invalid_argument, "unknown scaling mode '" + std::string(name) + "'");
}

std::string_view to_string(ScalingMode mode) {
  return mode == ScalingMode::global ? "global" : "featurewise";
}

std::size_t ScalingParams::degenerate_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < mins.size(); ++i) n += (maxs[i] == mins[i]);
  return n;
}

ScalingFit::ScalingFit(ScalingMode mode, FeatureLayout layout) : mode_(mode), layout_(layout) {
  const std::size_t n = mode == ScalingMode::global ? 1 : layout.n_features;
  mins_.assign(n, std::numeric_limits<double>::infinity());
  maxs_.assign(n, -std::numeric_limits<double>::infinity());
}

template <typename T>
void ScalingFit::update_impl(std::span<const T> items) {
  if (layout_.item_size == 0 || items.size() % layout_.item_size != 0)
    throw Error(ErrorCode::dimension_mismatch, "scaling input is not a whole number of items");
  const bool global = mode_ == ScalingMode::global;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double v = items[i];
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "scaling input contains non-finite values");
    const std::size_t f = global ? 0 : layout_.feature_of(i % layout_.item_size);
    if (v < mins_[f]) mins_[f] = v;
    if (v > maxs_[f]) maxs_[f] = v;
  }
}

void ScalingFit::update(std::span<const float> items) { update_impl(items); }
void ScalingFit::update(std::span<const double> items) { update_impl(items); }

ScalingParams ScalingFit::finish() const {
  for (std::size_t f = 0; f < mins_.size(); ++f)
    if (mins_[f] > maxs_[f]) throw Error(ErrorCode::invalid_argument, "scaling fit saw no data");
  return {mode_, mins_, maxs_};
}

namespace {

void check_params(const FeatureLayout& layout, const ScalingParams& p) {
  const std::size_t expected = p.mode == ScalingMode::global ? 1 : layout.n_features;
  if (p.mins.size() != expected || p.maxs.size() != expected)
    throw Error(ErrorCode::invalid_argument, "scaling parameters do not match the data layout or mode");
}

template <typename T>
void forward_impl(std::span<T> items, const FeatureLayout& layout, const ScalingParams& p) {
  check_params(layout, p);
  const bool global = p.mode == ScalingMode::global;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::size_t f = global ? 0 : layout.feature_of(i % layout.item_size);
    const double lo = p.mins[f];
    const double hi = p.maxs[f];
    items[i] = hi == lo ? T(0) : static_cast<T>(2.0 * (items[i] - lo) / (hi - lo) - 1.0);
  }
}

template <typename T>
void inverse_impl(std::span<T> items, const FeatureLayout& layout, const ScalingParams& p) {
  check_params(layout, p);
  const bool global = p.mode == ScalingMode::global;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::size_t f = global ? 0 : layout.feature_of(i % layout.item_size);
    const double lo = p.mins[f];
    const double hi = p.maxs[f];
    items[i] = static_cast<T>((items[i] + 1.0) * 0.5 * (hi - lo) + lo);
  }
}

}  // namespace

void apply_scaling(std::span<double> items, const FeatureLayout& layout, const ScalingParams& params) {
  forward_impl(items, layout, params);
}
void apply_scaling(std::span<float> items, const FeatureLayout& layout, const ScalingParams& params) {
  forward_impl(items, layout, params);
}
void unscale(std::span<double> items, const FeatureLayout& layout, const ScalingParams& params) {
  inverse_impl(items, layout, params);
}
void unscale(std::span<float> items, const FeatureLayout& layout, const ScalingParams& params) {
  inverse_impl(items, layout, params);
}

ScalingParams scale(std::span<double> items, const FeatureLayout& layout, ScalingMode mode,
                    const ScalingParams* fixed) {
  ScalingParams params;
  if (fixed) {
    if (fixed->mode != mode) throw Error(ErrorCode::invalid_argument, "scaling mode mismatch");
    params = *fixed;
  } else {
    ScalingFit fit(mode, layout);
    fit.update(std::span<const double>(items));
    params = fit.finish();
  }
  apply_scaling(items, layout, params);
  return params;
}

}  // namespace ofdmgen
