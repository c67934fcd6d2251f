#include "ofdmgen/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace ofdmgen::fft {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<Complex> data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(data.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void forward(std::span<Complex> data) { run(data, FFTW_FORWARD); }
void inverse(std::span<Complex> data) { run(data, FFTW_BACKWARD); }

void forward_unitary(std::span<Complex> data) {
  forward(data);
  const double s = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& v : data) v *= s;
}

void inverse_unitary(std::span<Complex> data) {
  inverse(data);
  const double s = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& v : data) v *= s;
}

void shift(std::span<Complex> data) {
  std::rotate(data.begin(), data.begin() + (data.size() + 1) / 2, data.end());
}

void inverse_shift(std::span<Complex> data) {
  std::rotate(data.begin(), data.begin() + data.size() / 2, data.end());
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ofdmgen::fft
