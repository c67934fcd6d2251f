#include "ofdmgen/ofdm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ofdmgen/channel.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/fft.hpp"

namespace ofdmgen {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::format: return "format";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::dimension_mismatch, what); }

int log2_exact(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

int gray(int i) { return i ^ (i >> 1); }

QamConstellation square_qam(int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(order)));
  const int axis_bits = log2_exact(side);
  // Per-axis levels 2i-(L-1); mean power per axis is (L^2-1)/3.
  const double norm = std::sqrt(2.0 * (order - 1) / 3.0);
  QamConstellation c{order, 2 * axis_bits, ComplexVector(order)};
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const int label = (gray(i) << axis_bits) | gray(q);
      c.points[label] = Complex(2 * i - (side - 1), 2 * q - (side - 1)) / norm;
    }
  }
  return c;
}

// 32-point cross: start from a Gray-labeled 8x4 rectangle and fold the
// outer columns (|I| = 7) onto the rows |Q| = 5. Labels inside the folded
// corners are only quasi-Gray; perfect Gray labeling does not exist here.
QamConstellation cross_qam32() {
  const double norm = std::sqrt(20.0);
  QamConstellation c{32, 5, ComplexVector(32)};
  for (int i = 0; i < 8; ++i) {
    for (int q = 0; q < 4; ++q) {
      const int label = (gray(i) << 2) | gray(q);
      int re = 2 * i - 7;
      int im = 2 * q - 3;
      if (std::abs(re) == 7) {
        const int new_re = (re > 0 ? 1 : -1) * (std::abs(im) == 3 ? 3 : 1);
        im = (im > 0 ? 1 : -1) * 5;
        re = new_re;
      }
      c.points[label] = Complex(re, im) / norm;
    }
  }
  return c;
}

}  // namespace

int QamConstellation::nearest(Complex s) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < order; ++i) {
    const double d = std::norm(s - points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

QamConstellation build_constellation(int order) {
  switch (order) {
    case 4:
    case 16:
    case 64: return square_qam(order);
    case 32: return cross_qam32();
    default: invalid("unsupported modulation order " + std::to_string(order));
  }
}

void ChannelSpec::validate() const {
  if (!(max_doppler_hz > 0.0) || !std::isfinite(max_doppler_hz)) invalid("max_doppler_hz must be positive");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) invalid("sample_rate_hz must be positive");
}

void WaveformSpec::validate() const {
  if (symbol_len != 128 && symbol_len != 256 && symbol_len != 512)
    invalid("symbol_len must be 128, 256 or 512");
  if (n_symbols < 1) invalid("n_symbols must be positive");
  if (cp_den <= 0 || cp_num < 0 || cp_num >= cp_den) invalid("cyclic prefix fraction must lie in [0, 1)");
  if ((symbol_len * cp_num) % cp_den != 0) invalid("cyclic prefix length must be an integer number of samples");
  if (mod_order != 4 && mod_order != 16 && mod_order != 32 && mod_order != 64)
    invalid("unsupported modulation order " + std::to_string(mod_order));
  const int n_occ = occupied_count ? *occupied_count : ofdmgen::occupied_count(symbol_len, alloc_class);
  if (n_occ < 1 || n_occ > max_occupied(symbol_len))
    invalid("occupied subcarrier count " + std::to_string(n_occ) + " outside [1, " +
            std::to_string(max_occupied(symbol_len)) + "]");
  if (std::isnan(target_evm_db) || target_evm_db >= 0.0) invalid("target_evm_db must be negative");
  if (pilot_enabled) {
    if (pilot_position < 0 || pilot_position >= n_symbols) invalid("pilot_position outside the waveform");
    if (n_occ < kMinZadoffChuLength) invalid("pilot requires at least 36 occupied subcarriers");
  }
  if (channel) channel->validate();
}

int max_occupied(int symbol_len) {
  switch (symbol_len) {
    case 128: return 75;
    case 256: return 150;
    case 512: return 300;
    default: invalid("symbol_len must be 128, 256 or 512");
  }
}

int occupied_count(int symbol_len, AllocClass cls) {
  const int n_max = max_occupied(symbol_len);
  int quarters = 2;
  switch (cls) {
    case AllocClass::small: quarters = 1; break;
    case AllocClass::medium: quarters = 2; break;
    case AllocClass::large: quarters = 3; break;
  }
  // round-half-up(quarters * n_max / 4) in integers
  return (quarters * n_max * 2 + 4) / 8;
}

Allocation build_allocation(int symbol_len, int count) {
  const int n_max = max_occupied(symbol_len);
  if (count < 1 || count > n_max) invalid("occupied count outside [1, " + std::to_string(n_max) + "]");
  Allocation a{symbol_len, n_max, {}};
  a.occupied.reserve(count);
  const int below = (count + 1) / 2;
  const int above = count / 2;
  for (int k = -below; k <= above; ++k) {
    if (k == 0) continue;
    a.occupied.push_back(k < 0 ? symbol_len + k : k);
  }
  return a;
}

Allocation build_allocation(int symbol_len, AllocClass cls) {
  return build_allocation(symbol_len, occupied_count(symbol_len, cls));
}

Allocation build_allocation(const WaveformSpec& spec) {
  return build_allocation(spec.symbol_len, spec.occupied_count ? *spec.occupied_count
                                                                : occupied_count(spec.symbol_len, spec.alloc_class));
}

ResourceGrid map_bits(std::span<const std::uint8_t> bits, const QamConstellation& constellation,
                      const Allocation& allocation, int n_symbols) {
  const std::size_t k = constellation.bits_per_symbol;
  const std::size_t n_sym = static_cast<std::size_t>(n_symbols) * allocation.size();
  if (bits.size() != n_sym * k)
    mismatch("bit count " + std::to_string(bits.size()) + " does not match " + std::to_string(n_sym * k));
  ResourceGrid grid(n_symbols, allocation.size());
  auto out = grid.values();
  for (std::size_t s = 0; s < n_sym; ++s) {
    int label = 0;
    for (std::size_t b = 0; b < k; ++b) label = (label << 1) | (bits[s * k + b] & 1);
    out[s] = constellation.points[label];
  }
  return grid;
}

std::vector<std::uint8_t> demap_bits(const ResourceGrid& grid, const QamConstellation& constellation) {
  const int k = constellation.bits_per_symbol;
  std::vector<std::uint8_t> bits;
  bits.reserve(grid.size() * k);
  for (const auto& s : grid.values()) {
    const int label = constellation.nearest(s);
    for (int b = k - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
  }
  return bits;
}

IqWaveform modulate(const ResourceGrid& grid, const WaveformSpec& spec) {
  return modulate(grid, spec, build_allocation(spec));
}

IqWaveform modulate(const ResourceGrid& grid, const WaveformSpec& spec, const Allocation& allocation) {
  if (grid.n_symbols() != static_cast<std::size_t>(spec.n_symbols) || grid.n_subcarriers() != allocation.size())
    mismatch("resource grid dimensions do not match the waveform spec");
  const std::size_t n = spec.symbol_len;
  const std::size_t cp = spec.cp_len();
  IqWaveform out;
  out.samples.resize(static_cast<std::size_t>(spec.waveform_len()));
  ComplexVector body(n);
  for (std::size_t sym = 0; sym < grid.n_symbols(); ++sym) {
    std::fill(body.begin(), body.end(), Complex{});
    const auto row = grid.row(sym);
    for (std::size_t c = 0; c < row.size(); ++c) body[allocation.occupied[c]] = row[c];
    fft::inverse_unitary(body);
    auto dst = out.samples.begin() + sym * (n + cp);
    std::copy(body.end() - cp, body.end(), dst);
    std::copy(body.begin(), body.end(), dst + cp);
  }
  return out;
}

ResourceGrid demodulate(const IqWaveform& waveform, const WaveformSpec& spec) {
  return demodulate(waveform, spec, build_allocation(spec));
}

ResourceGrid demodulate(const IqWaveform& waveform, const WaveformSpec& spec, const Allocation& allocation) {
  if (waveform.size() != static_cast<std::size_t>(spec.waveform_len()))
    mismatch("waveform length " + std::to_string(waveform.size()) + " does not match expected " +
             std::to_string(spec.waveform_len()));
  const std::size_t n = spec.symbol_len;
  const std::size_t cp = spec.cp_len();
  ResourceGrid grid(spec.n_symbols, allocation.size());
  ComplexVector body(n);
  for (std::size_t sym = 0; sym < grid.n_symbols(); ++sym) {
    auto src = waveform.samples.begin() + sym * (n + cp) + cp;
    std::copy(src, src + n, body.begin());
    fft::forward_unitary(body);
    auto row = grid.row(sym);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = body[allocation.occupied[c]];
  }
  return grid;
}

double calibrate_noise_sigma(double target_evm_db) {
  if (target_evm_db == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::pow(10.0, target_evm_db / 20.0);
}

IqWaveform add_awgn(const IqWaveform& waveform, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) invalid("noise sigma must be nonnegative");
  IqWaveform out = waveform;
  if (sigma == 0.0) return out;
  for (auto& s : out.samples) s += sigma * rng.complex_normal();
  return out;
}

int largest_prime_below(int n) {
  for (int p = n - 1; p >= 2; --p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) return p;
  }
  invalid("no prime below " + std::to_string(n));
}

ComplexVector zadoff_chu_pilot(int n_occupied) {
  if (n_occupied < kMinZadoffChuLength)
    invalid("Zadoff-Chu pilot needs at least 36 subcarriers, got " + std::to_string(n_occupied));
  const int nzc = largest_prime_below(n_occupied);
  // Group u = 0, base v = 0: q_bar = N_zc (u + 1) / 31, q = floor(q_bar + 1/2).
  const double q_bar = static_cast<double>(nzc) / 31.0;
  const long long q = static_cast<long long>(std::floor(q_bar + 0.5));
  ComplexVector seq(n_occupied);
  for (int n = 0; n < n_occupied; ++n) {
    const long long m = n % nzc;
    const long long phase = (q * m * (m + 1)) % (2LL * nzc);
    seq[n] = std::polar(1.0, -std::numbers::pi * static_cast<double>(phase) / nzc);
  }
  return seq;
}

std::vector<int> data_rows(const WaveformSpec& spec) {
  std::vector<int> rows;
  for (int r = 0; r < spec.n_symbols; ++r)
    if (!spec.pilot_enabled || r != spec.pilot_position) rows.push_back(r);
  return rows;
}

std::size_t bits_per_waveform(const WaveformSpec& spec) {
  const auto alloc = build_allocation(spec);
  const int k = log2_exact(spec.mod_order);
  return data_rows(spec).size() * alloc.size() * k;
}

GeneratedWaveform generate_waveform(const WaveformSpec& spec, std::uint64_t index) {
  spec.validate();
  const auto alloc = build_allocation(spec);
  const auto constellation = build_constellation(spec.mod_order);
  const auto rows = data_rows(spec);

  GeneratedWaveform out;
  Rng bit_rng(spec.seed, index, Stream::bits);
  out.bits.resize(bits_per_waveform(spec));
  for (auto& b : out.bits) b = static_cast<std::uint8_t>(bit_rng() >> 63);

  const auto data = map_bits(out.bits, constellation, alloc, static_cast<int>(rows.size()));
  out.grid = ResourceGrid(spec.n_symbols, alloc.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.row(i);
    std::copy(src.begin(), src.end(), out.grid.row(rows[i]).begin());
  }
  if (spec.pilot_enabled) {
    const auto pilot = zadoff_chu_pilot(static_cast<int>(alloc.size()));
    std::copy(pilot.begin(), pilot.end(), out.grid.row(spec.pilot_position).begin());
  }

  out.waveform = modulate(out.grid, spec, alloc);
  Rng noise_rng(spec.seed, index, Stream::noise);
  out.waveform = add_awgn(out.waveform, calibrate_noise_sigma(spec.target_evm_db), noise_rng);
  if (spec.channel) {
    Rng channel_rng(spec.seed ^ mix64(spec.channel->seed), index, Stream::channel);
    const auto realization = realize_channel(*spec.channel, out.waveform.size(), channel_rng);
    out.waveform = apply_channel(out.waveform, realization);
  }
  return out;
}

}  // namespace ofdmgen
