#include "bid/model.hpp"

#include "bid/distributions.hpp"
#include "bid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace bid {

void validate(const Hyperparameters& hp, std::size_t n) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!(std::isfinite(hp.a) && std::isfinite(hp.b) && hp.a < hp.b))
    throw ConfigError("magnitude bounds must satisfy a < b");
  if (!positive(hp.alpha_sigma) || !positive(hp.beta_sigma))
    throw ConfigError("alpha_sigma and beta_sigma must be positive");
  if (!positive(hp.gbt_tau) || !std::isfinite(hp.gbt_mu))
    throw ConfigError("GBT prior requires finite mu and positive tau");
  if (!positive(hp.tau_mu) || !positive(hp.alpha_t) || !positive(hp.beta_t) ||
      !std::isfinite(hp.mu_mu))
    throw ConfigError("tau_mu, alpha_t and beta_t must be positive");
  if (hp.k < 1) throw ConfigError("k must be at least 1");
  if (hp.k > n)
    throw ConfigError("k = " + std::to_string(hp.k) + " exceeds the number of columns " +
                      std::to_string(n));
  if (hp.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (hp.burn_in >= hp.iterations) throw ConfigError("burn_in must be smaller than iterations");
  if (hp.thinning < 1) throw ConfigError("thinning must be at least 1");
  if (hp.aggressive && hp.variant == Variant::gbtn)
    throw ConfigError("the aggressive sampler is only defined for GBT");
}

StateVector::StateVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

StateVector StateVector::random_subset(std::size_t n, std::size_t k, RandomSource& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t i = 0; i < k; ++i) bits[idx[i]] = 1;
  return StateVector(std::move(bits));
}

std::size_t StateVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<std::size_t> StateVector::basis() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < bits_.size(); ++n)
    if (bits_[n]) out.push_back(n);
  return out;
}

std::vector<std::size_t> StateVector::interpolated() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < bits_.size(); ++n)
    if (!bits_[n]) out.push_back(n);
  return out;
}

void StateVector::swap_in(std::size_t j, std::size_t i) {
  if (!bits_.at(j) || bits_.at(i)) throw NumericalError("swap_in requires r_j = 1 and r_i = 0");
  bits_[j] = 0;
  bits_[i] = 1;
}

ObservedMatrix::ObservedMatrix(DenseMatrix v)
    : values(std::move(v)), observed(values.size(), 1) {}

ObservedMatrix::ObservedMatrix(DenseMatrix v, std::vector<std::uint8_t> mask)
    : values(std::move(v)), observed(std::move(mask)) {
  if (observed.size() != values.size()) throw InputError("mask dimensions do not match values");
  auto data = values.data();
  for (std::size_t i = 0; i < observed.size(); ++i) {
    observed[i] = observed[i] ? 1 : 0;
    if (!observed[i]) data[i] = 0.0;
  }
}

std::size_t ObservedMatrix::observed_count() const noexcept {
  return static_cast<std::size_t>(std::count(observed.begin(), observed.end(), 1));
}

DenseMatrix build_x(const DenseMatrix& a, const StateVector& r) {
  DenseMatrix x(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t n = 0; n < a.cols(); ++n)
      if (r.is_basis(n)) x(i, n) = a(i, n);
  return x;
}

void rebuild_x(IdState& state, const DenseMatrix& a) { state.x = build_x(a, state.r); }

IdState init_state(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng) {
  const std::size_t n = data.cols();
  if (data.values.empty()) throw InputError("data matrix is empty");
  validate(hp, n);

  IdState s;
  s.r = StateVector::random_subset(n, hp.k, rng);
  rebuild_x(s, data.values);
  s.sigma2 = std::max(1e-6, sample_inverse_gamma({hp.alpha_sigma, hp.beta_sigma}, rng));

  s.gtn_mu = DenseMatrix(n, n, hp.gbt_mu);
  s.gtn_tau = DenseMatrix(n, n, hp.gbt_tau);
  if (hp.variant == Variant::gbtn) {
    for (double& m : s.gtn_mu.data()) m = sample_normal(hp.mu_mu, hp.tau_mu, rng);
    for (double& t : s.gtn_tau.data()) t = sample_gamma({hp.alpha_t, hp.beta_t}, rng);
  }

  s.y = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      s.y(k, l) = sample_gtn({s.gtn_mu(k, l), s.gtn_tau(k, l), hp.a, hp.b}, rng);
  return s;
}

void validate_state(const IdState& state, const ObservedMatrix& data, const Hyperparameters& hp) {
  const std::size_t m = data.rows();
  const std::size_t n = data.cols();
  auto fail = [](const std::string& what) { throw NumericalError("state invariant: " + what); };
  if (state.r.size() != n) fail("state vector length");
  if (state.r.count() != hp.k) fail("|J| = " + std::to_string(state.r.count()) + " != K");
  if (state.x.rows() != m || state.x.cols() != n) fail("X shape");
  if (state.y.rows() != n || state.y.cols() != n) fail("Y shape");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < n; ++c) {
      const double expected = state.r.is_basis(c) ? data.values(i, c) : 0.0;
      if (state.x(i, c) != expected) fail("X column " + std::to_string(c) + " out of sync with r");
    }
  for (double v : state.y.data())
    if (!(v >= hp.a && v <= hp.b)) fail("Y entry outside [a, b]");
  if (!(state.sigma2 > 0.0) || !std::isfinite(state.sigma2)) fail("sigma2 not positive");
  for (double t : state.gtn_tau.data())
    if (!(t > 0.0)) fail("tau_kl not positive");
}

} // namespace bid
