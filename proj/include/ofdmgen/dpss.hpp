#pragma once

#include <cstddef>
#include <vector>

namespace ofdmgen {

/// Discrete prolate spheroidal (Slepian) sequences.
struct DpssTapers {
  std::size_t length = 0;
  double nw = 0.0;
  std::vector<std::vector<double>> tapers;  // unit energy, ordered by concentration
  std::vector<double> eigenvalues;          // of the tridiagonal commuting matrix, descending
};

/// The `count` most concentrated tapers for time-bandwidth product `nw`.
/// Computed from the tridiagonal commuting matrix by bisection and inverse
/// iteration; results are cached per (length, nw, count).
const DpssTapers& dpss(std::size_t length, double nw, std::size_t count);

}  // namespace ofdmgen
