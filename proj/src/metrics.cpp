#include "ofdmgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ofdmgen/dpss.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/fft.hpp"
#include "ofdmgen/parallel.hpp"

namespace ofdmgen {

Psd multitaper_psd(const IqWaveform& waveform, const MultitaperConfig& cfg) {
  const std::size_t n = waveform.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "multitaper PSD of an empty waveform");
  const std::size_t nfft = fft::next_pow2(n);
  const auto& tapers = dpss(n, cfg.nw, cfg.tapers);

  Psd psd;
  psd.values.assign(nfft, 0.0);
  ComplexVector buf(nfft);
  for (const auto& h : tapers.tapers) {
    std::fill(buf.begin(), buf.end(), Complex{});
    for (std::size_t i = 0; i < n; ++i) buf[i] = h[i] * waveform.samples[i];
    fft::forward(buf);
    fft::shift(buf);
    for (std::size_t i = 0; i < nfft; ++i) psd.values[i] += std::norm(buf[i]);
  }
  const double inv_k = 1.0 / static_cast<double>(tapers.tapers.size());
  for (auto& v : psd.values) v = std::max(v * inv_k, kPsdFloor);
  return psd;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Psd median_psd(std::span<const Psd> psds) {
  if (psds.empty()) throw Error(ErrorCode::invalid_argument, "median PSD of an empty set");
  const std::size_t nfft = psds.front().nfft();
  for (const auto& p : psds)
    if (p.nfft() != nfft) throw Error(ErrorCode::dimension_mismatch, "PSDs have different frequency grids");
  Psd out;
  out.values.resize(nfft);
  std::vector<double> column(psds.size());
  for (std::size_t b = 0; b < nfft; ++b) {
    for (std::size_t i = 0; i < psds.size(); ++i) column[i] = psds[i].values[b];
    out.values[b] = median(column);
  }
  return out;
}

Psd median_psd(std::span<const IqWaveform> waveforms, const MultitaperConfig& cfg) {
  if (waveforms.empty()) throw Error(ErrorCode::invalid_argument, "median PSD of an empty set");
  for (const auto& w : waveforms)
    if (w.size() != waveforms.front().size())
      throw Error(ErrorCode::dimension_mismatch, "waveforms in a test set must have equal lengths");
  std::vector<Psd> psds(waveforms.size());
  parallel_for(waveforms.size(), [&](std::size_t i) { psds[i] = multitaper_psd(waveforms[i], cfg); });
  return median_psd(psds);
}

double psd_geodesic_distance(const Psd& generated, const Psd& target) {
  if (generated.nfft() != target.nfft() || generated.nfft() == 0)
    throw Error(ErrorCode::dimension_mismatch, "PSDs have different frequency grids");
  const std::size_t n = target.nfft();
  const double df = target.df();
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = std::max(generated.values[k], kPsdFloor);
    const double t = std::max(target.values[k], kPsdFloor);
    if (!(g > 0.0) || !(t > 0.0) || !std::isfinite(g) || !std::isfinite(t))
      throw Error(ErrorCode::invalid_argument, "PSD bins must be positive and finite");
    r[k] = std::log(g / t);
  }
  double mean = 0.0;
  double width = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean += r[k] * df;
    width += df;
  }
  // sum r^2 df - mean^2 == sum (r - mean)^2 df + mean^2 (1 - width), evaluated
  // in the centered form to avoid cancellation.
  double acc = mean * mean * (1.0 - width);
  for (std::size_t k = 0; k < n; ++k) acc += (r[k] - mean) * (r[k] - mean) * df;
  return std::sqrt(std::max(acc, 0.0));
}

double evm_db(std::span<const Complex> measured, const QamConstellation& constellation) {
  if (measured.empty()) throw Error(ErrorCode::invalid_argument, "EVM of an empty symbol set");
  double err = 0.0;
  for (const auto& s : measured) err += std::norm(s - constellation.points[constellation.nearest(s)]);
  double ref = 0.0;
  for (const auto& p : constellation.points) ref += std::norm(p);
  ref /= static_cast<double>(constellation.points.size());
  const double evm = std::sqrt((err / static_cast<double>(measured.size())) / ref);
  if (evm == 0.0) return kEvmFloorDb;
  return std::max(20.0 * std::log10(evm), kEvmFloorDb);
}

double evm_db(const ResourceGrid& measured, const QamConstellation& constellation) {
  return evm_db(measured.values(), constellation);
}

double median_evm_db(std::span<const ResourceGrid> grids, const QamConstellation& constellation) {
  if (grids.empty()) throw Error(ErrorCode::invalid_argument, "median EVM of an empty set");
  std::vector<double> v(grids.size());
  parallel_for(grids.size(), [&](std::size_t i) { v[i] = evm_db(grids[i], constellation); });
  return median(std::move(v));
}

std::optional<int> ConstellationHistogram::bin_of(double v) {
  if (!(v >= -kExtent && v <= kExtent)) return std::nullopt;
  const int b = static_cast<int>(std::floor((v + kExtent) * (kBins / (2.0 * kExtent))));
  return std::min(b, kBins - 1);
}

void ConstellationHistogram::add(Complex s) {
  const auto i = bin_of(s.real());
  const auto q = bin_of(s.imag());
  if (!i || !q) {
    ++dropped;
    return;
  }
  ++counts[*i * kBins + *q];
}

void ConstellationHistogram::add(std::span<const Complex> symbols) {
  for (const auto& s : symbols) add(s);
}

void ConstellationHistogram::merge(const ConstellationHistogram& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  dropped += other.dropped;
}

std::uint64_t ConstellationHistogram::binned() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::ptrdiff_t CpCorrelation::peak_relative_lag(std::size_t s) const {
  const auto& p = profiles.at(s);
  const auto it = std::max_element(p.begin(), p.end());
  return static_cast<std::ptrdiff_t>(it - p.begin()) - static_cast<std::ptrdiff_t>(s * symbol_len);
}

CpCorrelation cp_crosscorr(const IqWaveform& waveform, const WaveformSpec& spec) {
  if (waveform.size() != static_cast<std::size_t>(spec.waveform_len()))
    throw Error(ErrorCode::dimension_mismatch, "waveform length " + std::to_string(waveform.size()) +
                                                   " does not match expected " + std::to_string(spec.waveform_len()));
  const std::size_t n = spec.symbol_len;
  const std::size_t cp = spec.cp_len();
  const std::size_t n_sym = spec.n_symbols;
  CpCorrelation out;
  out.symbol_len = n;
  out.cp_len = cp;
  if (cp == 0) throw Error(ErrorCode::invalid_argument, "waveform has no cyclic prefix");

  const std::size_t len = n_sym * n;
  ComplexVector stripped(len);
  for (std::size_t s = 0; s < n_sym; ++s) {
    auto src = waveform.samples.begin() + s * (n + cp) + cp;
    std::copy(src, src + n, stripped.begin() + s * n);
  }
  // Sliding window energy of the stripped waveform.
  std::vector<double> cum(len + 1, 0.0);
  for (std::size_t i = 0; i < len; ++i) cum[i + 1] = cum[i] + std::norm(stripped[i]);

  const std::size_t n_lags = len - cp + 1;
  const std::size_t nfft = fft::next_pow2(len + cp);
  ComplexVector y(nfft), c(nfft);
  std::copy(stripped.begin(), stripped.end(), y.begin());
  fft::forward(y);

  out.profiles.assign(n_sym, std::vector<double>(n_lags, 0.0));
  out.symbol_max.assign(n_sym, 0.0);
  for (std::size_t s = 0; s < n_sym; ++s) {
    std::fill(c.begin(), c.end(), Complex{});
    auto src = waveform.samples.begin() + s * (n + cp);
    double e_cp = 0.0;
    for (std::size_t i = 0; i < cp; ++i) {
      c[i] = src[i];
      e_cp += std::norm(src[i]);
    }
    fft::forward(c);
    // corr[l] = sum_i y[l + i] conj(cp[i])
    for (std::size_t k = 0; k < nfft; ++k) c[k] = y[k] * std::conj(c[k]);
    fft::inverse(c);
    auto& prof = out.profiles[s];
    for (std::size_t l = 0; l < n_lags; ++l) {
      const double e_y = std::max(cum[l + cp] - cum[l], 0.0);
      const double denom = std::sqrt(e_cp * e_y);
      prof[l] = denom > 0.0 ? std::abs(c[l]) / static_cast<double>(nfft) / denom : 0.0;
    }
    out.symbol_max[s] = *std::max_element(prof.begin(), prof.end());
  }
  out.max = *std::max_element(out.symbol_max.begin(), out.symbol_max.end());
  return out;
}

CpCorrelation median_cp_profile(std::span<const CpCorrelation> correlations) {
  if (correlations.empty()) throw Error(ErrorCode::invalid_argument, "median profile of an empty set");
  const auto& first = correlations.front();
  for (const auto& c : correlations)
    if (c.profiles.size() != first.profiles.size() || c.n_lags() != first.n_lags())
      throw Error(ErrorCode::dimension_mismatch, "cross-correlation profiles differ in shape");
  CpCorrelation out;
  out.symbol_len = first.symbol_len;
  out.cp_len = first.cp_len;
  out.profiles.assign(first.profiles.size(), std::vector<double>(first.n_lags()));
  out.symbol_max.resize(first.profiles.size());
  std::vector<double> column(correlations.size());
  for (std::size_t s = 0; s < first.profiles.size(); ++s) {
    for (std::size_t l = 0; l < first.n_lags(); ++l) {
      for (std::size_t i = 0; i < correlations.size(); ++i) column[i] = correlations[i].profiles[s][l];
      out.profiles[s][l] = median(column);
    }
    out.symbol_max[s] = *std::max_element(out.profiles[s].begin(), out.profiles[s].end());
  }
  out.max = *std::max_element(out.symbol_max.begin(), out.symbol_max.end());
  return out;
}

double cp_relerr_pct(double r_gen, double r_target) {
  if (r_target == 0.0) throw Error(ErrorCode::invalid_argument, "target cross-correlation is zero");
  return std::abs(r_gen - r_target) / std::abs(r_target) * 100.0;
}

namespace {
double median_cp_max(std::span<const IqWaveform> set, const WaveformSpec& spec) {
  if (set.empty()) throw Error(ErrorCode::invalid_argument, "cyclic prefix metric of an empty set");
  std::vector<double> maxima(set.size());
  parallel_for(set.size(), [&](std::size_t i) { maxima[i] = cp_crosscorr(set[i], spec).max; });
  return median(std::move(maxima));
}
}  // namespace

double cp_relerr_pct(std::span<const IqWaveform> generated, std::span<const IqWaveform> target,
                     const WaveformSpec& spec) {
  return cp_relerr_pct(median_cp_max(generated, spec), median_cp_max(target, spec));
}

}  // namespace ofdmgen
