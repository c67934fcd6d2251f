#include "ofdmgen/dpss.hpp"

#include <lapacke.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "ofdmgen/error.hpp"

namespace ofdmgen {
namespace {

DpssTapers compute(std::size_t n, double nw, std::size_t count) {
  if (n < 2 || count < 1 || count > n || !(nw > 0.0) || nw >= n / 2.0)
    throw Error(ErrorCode::invalid_argument, "invalid DPSS parameters");
  const double w = nw / static_cast<double>(n);
  const double c = std::cos(2.0 * std::numbers::pi * w);
  std::vector<double> d(n), e(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(n) - 1.0 - 2.0 * i) / 2.0;
    d[i] = t * t * c;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = static_cast<double>((i + 1) * (n - i - 1)) / 2.0;

  const lapack_int ln = static_cast<lapack_int>(n);
  const lapack_int il = ln - static_cast<lapack_int>(count) + 1;
  lapack_int m = 0, nsplit = 0;
  std::vector<double> evals(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  lapack_int info = LAPACKE_dstebz('I', 'B', ln, 0.0, 0.0, il, ln, 0.0, d.data(), e.data(), &m, &nsplit,
                                   evals.data(), iblock.data(), isplit.data());
  if (info != 0 || m != static_cast<lapack_int>(count))
    throw Error(ErrorCode::invalid_argument, "DPSS eigenvalue computation failed (info " + std::to_string(info) + ")");

  std::vector<double> z(n * count);
  std::vector<lapack_int> ifail(count);
  info = LAPACKE_dstein(LAPACK_COL_MAJOR, ln, d.data(), e.data(), m, evals.data(), iblock.data(), isplit.data(),
                        z.data(), ln, ifail.data());
  if (info != 0) throw Error(ErrorCode::invalid_argument, "DPSS eigenvector computation failed");

  DpssTapers out{n, nw, {}, {}};
  // dstebz orders ascending within the selected range; largest first here.
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t col = count - 1 - j;
    std::vector<double> v(z.begin() + col * n, z.begin() + (col + 1) * n);
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    // Sign convention: even tapers sum positive, odd tapers start positive.
    double ref = 0.0;
    if (j % 2 == 0) {
      ref = std::accumulate(v.begin(), v.end(), 0.0);
    } else {
      for (std::size_t i = 0; i < n; ++i) ref += (static_cast<double>(n) - 1.0 - 2.0 * i) * v[i];
    }
    const double s = (ref < 0.0 ? -1.0 : 1.0) / norm;
    for (auto& x : v) x *= s;
    out.tapers.push_back(std::move(v));
    out.eigenvalues.push_back(evals[col]);
  }
  return out;
}

}  // namespace

const DpssTapers& dpss(std::size_t length, double nw, std::size_t count) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, double, std::size_t>, std::unique_ptr<DpssTapers>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(length, nw, count);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<DpssTapers>(compute(length, nw, count))).first;
  return *it->second;
}

}  // namespace ofdmgen
