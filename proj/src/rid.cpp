#include "bid/rid.hpp"

#include "bid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bid {

RidResult randomized_id(const DenseMatrix& a, std::size_t k, double oversample,
                        RandomSource& rng) {
  const std::size_t n = a.cols();
  if (a.empty()) throw InputError("randomized ID: empty matrix");
  if (k < 1 || k > std::min(a.rows(), n))
    throw ConfigError("randomized ID: k must lie in [1, min(rows, cols)], got " +
                      std::to_string(k));
  if (!(oversample >= 1.0) || !std::isfinite(oversample))
    throw ConfigError("randomized ID: oversample must be >= 1");

  // The small slack keeps e.g. 1.2 * 5 from rounding up to 7.
  auto sample_size = static_cast<std::size_t>(
      std::ceil(oversample * static_cast<double>(k) - 1e-9));
  sample_size = std::clamp(sample_size, k, n);

  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  for (std::size_t i = 0; i < sample_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    std::swap(cols[i], cols[j]);
  }
  cols.resize(sample_size);
  std::sort(cols.begin(), cols.end());

  const PivotedQr qr = cpqr(a.select_columns(cols));
  RidResult out;
  for (std::size_t i = 0; i < k; ++i) out.j_set.push_back(cols[qr.perm[i]]);
  out.c = a.select_columns(out.j_set);
  try {
    out.w = solve_least_squares(out.c, a);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("randomized ID with k = ") + std::to_string(k) +
                         " selected a rank-deficient basis: " + e.what());
  }
  out.max_abs_w = max_abs(out.w);
  return out;
}

double max_magnitude_excess(const DenseMatrix& w) { return std::max(0.0, max_abs(w) - 1.0); }

} // namespace bid
