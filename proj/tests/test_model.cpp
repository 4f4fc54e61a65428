#include "bid/error.hpp"
#include "bid/model.hpp"

#include <doctest.h>

#include <vector>

using namespace bid;

namespace {

ObservedMatrix gaussian_data(std::size_t m, std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  DenseMatrix a(m, n);
  for (double& v : a.data()) v = rng.normal();
  return ObservedMatrix(std::move(a));
}

Hyperparameters with_k(std::size_t k) {
  Hyperparameters hp;
  hp.k = k;
  return hp;
}

} // namespace

TEST_CASE("hyperparameter defaults") {
  const Hyperparameters hp;
  CHECK(hp.a == -1.0);
  CHECK(hp.b == 1.0);
  CHECK(hp.alpha_sigma == 0.1);
  CHECK(hp.beta_sigma == 1.0);
  CHECK(hp.gbt_mu == 0.0);
  CHECK(hp.gbt_tau == 1.0);
  CHECK(hp.mu_mu == 0.0);
  CHECK(hp.tau_mu == 0.1);
  CHECK(hp.alpha_t == 1.0);
  CHECK(hp.beta_t == 1.0);
  CHECK(hp.iterations == 500);
  CHECK(hp.burn_in == 100);
  CHECK(hp.thinning == 5);
}

TEST_CASE("hyperparameter validation") {
  CHECK_NOTHROW(validate(with_k(3), 3));
  CHECK_THROWS_AS(validate(with_k(0), 3), ConfigError);
  CHECK_THROWS_AS(validate(with_k(4), 3), ConfigError);
  Hyperparameters hp = with_k(1);
  hp.a = 1.0;
  CHECK_THROWS_AS(validate(hp, 3), ConfigError);
  hp = with_k(1);
  hp.beta_sigma = 0.0;
  CHECK_THROWS_AS(validate(hp, 3), ConfigError);
  hp = with_k(1);
  hp.burn_in = hp.iterations;
  CHECK_THROWS_AS(validate(hp, 3), ConfigError);
  hp = with_k(1);
  hp.thinning = 0;
  CHECK_THROWS_AS(validate(hp, 3), ConfigError);
  hp = with_k(1);
  hp.variant = Variant::gbtn;
  hp.aggressive = true;
  CHECK_THROWS_AS(validate(hp, 3), ConfigError);
}

TEST_CASE("state vector partition") {
  RandomSource rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.index(30);
    const std::size_t k = 1 + rng.index(n);
    StateVector r = StateVector::random_subset(n, k, rng);
    CHECK(r.count() == k);
    const auto j = r.basis();
    const auto i = r.interpolated();
    CHECK(j.size() + i.size() == n);
    std::vector<int> seen(n, 0);
    for (auto v : j) seen[v] += 1;
    for (auto v : i) seen[v] += 1;
    for (int s : seen) CHECK(s == 1);
    if (!i.empty()) {
      r.swap_in(j.front(), i.front());
      CHECK(r.count() == k);
      CHECK(r.is_basis(i.front()));
      CHECK_FALSE(r.is_basis(j.front()));
    }
  }
  StateVector r(std::vector<std::uint8_t>{1, 0, 0});
  CHECK_THROWS(r.swap_in(1, 2));
}

TEST_CASE("random subsets are uniform") {
  RandomSource rng(2);
  std::vector<int> hits(6, 0);
  const int draws = 60000;
  for (int t = 0; t < draws; ++t)
    for (auto j : StateVector::random_subset(6, 2, rng).basis()) hits[j] += 1;
  // Inclusion probability 1/3; binomial sd about 115.
  for (int h : hits) CHECK(std::abs(h - draws / 3) < 600);
}

TEST_CASE("observed matrix zero-fills masked cells") {
  DenseMatrix v(2, 2, std::vector<double>{1, 2, 3, 4});
  ObservedMatrix m(v, {1, 1, 1, 0});
  CHECK(m.values(1, 1) == 0.0);
  CHECK(m.observed_count() == 3);
  CHECK_FALSE(m.is_observed(1, 1));
  CHECK_THROWS_AS(ObservedMatrix(v, {1, 1}), InputError);
}

TEST_CASE("init_state with K = N uses every column") {
  const ObservedMatrix data = gaussian_data(4, 5, 3);
  RandomSource rng(4);
  const IdState s = init_state(data, with_k(5), rng);
  CHECK(s.r.count() == 5);
  CHECK(s.x == data.values);
  CHECK_NOTHROW(validate_state(s, data, with_k(5)));
}

TEST_CASE("init_state with K = 1 of 3") {
  const ObservedMatrix data = gaussian_data(4, 3, 5);
  RandomSource rng(6);
  const IdState s = init_state(data, with_k(1), rng);
  CHECK(s.r.count() == 1);
  int zero_columns = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    bool all_zero = true;
    for (std::size_t i = 0; i < 4; ++i) all_zero = all_zero && s.x(i, c) == 0.0;
    zero_columns += all_zero;
  }
  CHECK(zero_columns == 2);
  for (double v : s.y.data()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  CHECK(s.sigma2 >= 1e-6);
  CHECK_THROWS_AS(init_state(data, with_k(4), rng), ConfigError);
}

TEST_CASE("init_state is deterministic") {
  const ObservedMatrix data = gaussian_data(6, 8, 7);
  Hyperparameters hp = with_k(3);
  hp.variant = Variant::gbtn;
  RandomSource a(99), b(99);
  const IdState s1 = init_state(data, hp, a);
  const IdState s2 = init_state(data, hp, b);
  CHECK(s1 == s2);
  // GBTN draws per-entry hyperparameters.
  CHECK(s1.gtn_mu(0, 0) != s1.gtn_mu(0, 1));
  CHECK(s1.gtn_tau(0, 0) > 0.0);
}

TEST_CASE("GBT keeps the fixed prior parameters") {
  const ObservedMatrix data = gaussian_data(6, 8, 8);
  RandomSource rng(1);
  const IdState s = init_state(data, with_k(3), rng);
  for (double m : s.gtn_mu.data()) CHECK(m == 0.0);
  for (double t : s.gtn_tau.data()) CHECK(t == 1.0);
}

TEST_CASE("validate_state catches corruption") {
  const ObservedMatrix data = gaussian_data(4, 5, 9);
  RandomSource rng(2);
  const Hyperparameters hp = with_k(2);
  IdState s = init_state(data, hp, rng);
  CHECK_NOTHROW(validate_state(s, data, hp));

  IdState bad = s;
  bad.y(0, 0) = 1.5;
  CHECK_THROWS_AS(validate_state(bad, data, hp), NumericalError);
  bad = s;
  bad.x(0, s.r.interpolated().front()) = 1.0;
  CHECK_THROWS_AS(validate_state(bad, data, hp), NumericalError);
  bad = s;
  bad.sigma2 = 0.0;
  CHECK_THROWS_AS(validate_state(bad, data, hp), NumericalError);
  bad = s;
  bad.r.swap_in(s.r.basis().front(), s.r.interpolated().front());
  CHECK_THROWS_AS(validate_state(bad, data, hp), NumericalError);
}
