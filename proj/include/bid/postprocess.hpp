#pragma once

#include "bid/linalg.hpp"
#include "bid/model.hpp"

#include <cstddef>
#include <vector>

namespace bid {

/// A ~ C W with C = A[:, J] and W[:, J] = I.
struct CanonicalId {
  std::vector<std::size_t> j_set;  // ascending
  DenseMatrix c;                   // M x K
  DenseMatrix w;                   // K x N, identity enforced
  DenseMatrix w_raw;               // Y[J, :] before enforcement
};

CanonicalId extract_canonical(const IdState& state, const ObservedMatrix& data);

/// Overwrites W[:, j_set] with the identity, in place.
void enforce_identity(DenseMatrix& w, const std::vector<std::size_t>& j_set);

} // namespace bid
