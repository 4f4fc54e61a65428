#include "bid/diagnostics.hpp"
#include "bid/error.hpp"
#include "bid/postprocess.hpp"
#include "bid/sampler.hpp"

#include <doctest.h>

#include <algorithm>

using namespace bid;

namespace {

ObservedMatrix gaussian_data(std::size_t m, std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  DenseMatrix a(m, n);
  for (double& v : a.data()) v = rng.normal();
  return ObservedMatrix(std::move(a));
}

IdState state_for(const ObservedMatrix& data, std::size_t k, std::uint64_t seed) {
  Hyperparameters hp;
  hp.k = k;
  RandomSource rng(seed);
  return init_state(data, hp, rng);
}

} // namespace

TEST_CASE("identity enforcement is idempotent") {
  RandomSource rng(1);
  DenseMatrix w(3, 7);
  for (double& v : w.data()) v = rng.normal();
  const std::vector<std::size_t> j{1, 4, 6};
  enforce_identity(w, j);
  const DenseMatrix once = w;
  enforce_identity(w, j);
  CHECK(w == once);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(w(r, j[c]) == (r == c ? 1.0 : 0.0));
  CHECK_THROWS_AS(enforce_identity(w, {1, 4}), InputError);
}

TEST_CASE("canonical decomposition shapes and content") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const std::size_t k = 1 + seed % n;
    const ObservedMatrix data = gaussian_data(4 + seed % 5, n, seed);
    const IdState s = state_for(data, k, seed + 50);
    const CanonicalId id = extract_canonical(s, data);
    REQUIRE(id.j_set == s.r.basis());
    CHECK(std::is_sorted(id.j_set.begin(), id.j_set.end()));
    CHECK(id.c.rows() == data.rows());
    CHECK(id.c.cols() == k);
    CHECK(id.w.rows() == k);
    CHECK(id.w.cols() == n);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i < data.rows(); ++i) CHECK(id.c(i, c) == data.values(i, id.j_set[c]));
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t l = 0; l < n; ++l) {
        CHECK(id.w_raw(r, l) == s.y(id.j_set[r], l));
        if (!s.r.is_basis(l)) CHECK(id.w(r, l) == id.w_raw(r, l));
      }
  }
}

TEST_CASE("C W reproduces X Y on interpolated columns") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ObservedMatrix data = gaussian_data(6, 9, seed);
    const IdState s = state_for(data, 1 + seed % 9, seed + 7);
    const CanonicalId id = extract_canonical(s, data);
    const DenseMatrix cw = multiply(id.c, id.w);
    const DenseMatrix xy = multiply(s.x, s.y);
    for (std::size_t i = 0; i < data.rows(); ++i)
      for (std::size_t l = 0; l < data.cols(); ++l) {
        if (s.r.is_basis(l))
          CHECK(cw(i, l) == data.values(i, l));
        else
          CHECK(std::abs(cw(i, l) - xy(i, l)) <= 1e-12);
      }
  }
}

TEST_CASE("enforcing the identity does not hurt on exact instances") {
  // Columns 0..2 form the basis; the rest are combinations with |w| <= 1.
  std::size_t no_worse = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSource rng(seed);
    DenseMatrix b(20, 3);
    for (double& v : b.data()) v = rng.normal();
    DenseMatrix w(3, 8);
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t r = 0; r < 3; ++r) w(r, c) = c < 3 ? (r == c) : 2.0 * rng.uniform() - 1.0;
    const ObservedMatrix data(multiply(b, w));
    Hyperparameters hp;
    hp.k = 3;
    hp.iterations = 1;
    hp.burn_in = 0;
    RandomSource srng(seed + 1);
    IdState s = init_state(data, hp, srng);
    s.r = StateVector({1, 1, 1, 0, 0, 0, 0, 0});
    rebuild_x(s, data.values);
    s.sigma2 = 1e-3;
    for (int t = 0; t < 50; ++t) {
      sample_sigma2(s, data, hp, srng);
      sweep_y(s, data, hp, srng);
    }
    const CanonicalId id = extract_canonical(s, data);
    if (mse_of(data.values, multiply(id.c, id.w)) <= mse(data.values, s.x, s.y) + 1e-12) ++no_worse;
  }
  CHECK(no_worse >= 9);
}

TEST_CASE("state must match the data") {
  const ObservedMatrix data = gaussian_data(4, 5, 3);
  const IdState s = state_for(data, 2, 4);
  CHECK_THROWS_AS(extract_canonical(s, gaussian_data(4, 6, 5)), InputError);
}
