#include "bid/postprocess.hpp"

#include "bid/error.hpp"

namespace bid {

void enforce_identity(DenseMatrix& w, const std::vector<std::size_t>& j_set) {
  if (w.rows() != j_set.size()) throw InputError("enforce_identity: W rows must equal |J|");
  for (std::size_t r = 0; r < j_set.size(); ++r)
    for (std::size_t c = 0; c < j_set.size(); ++c) w(r, j_set[c]) = r == c ? 1.0 : 0.0;
}

CanonicalId extract_canonical(const IdState& state, const ObservedMatrix& data) {
  if (state.r.size() != data.cols()) throw InputError("state does not match data columns");
  CanonicalId out;
  out.j_set = state.r.basis();
  out.c = data.values.select_columns(out.j_set);
  out.w_raw = state.y.select_rows(out.j_set);
  out.w = out.w_raw;
  enforce_identity(out.w, out.j_set);
  return out;
}

} // namespace bid
