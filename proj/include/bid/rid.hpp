#pragma once

#include "bid/linalg.hpp"
#include "bid/random.hpp"

#include <cstddef>
#include <vector>

namespace bid {

struct RidResult {
  std::vector<std::size_t> j_set;  // in pivot order
  DenseMatrix c;                   // A[:, j_set]
  DenseMatrix w;                   // least-squares weights over all of A
  double max_abs_w = 0.0;
};

/// Randomized ID: sample ceil(oversample * k) distinct columns uniformly,
/// keep the first k pivots of their column-pivoted QR, solve W by least squares.
RidResult randomized_id(const DenseMatrix& a, std::size_t k, double oversample,
                        RandomSource& rng);

/// max(0, max |w_ij| - 1).
double max_magnitude_excess(const DenseMatrix& w);

} // namespace bid
