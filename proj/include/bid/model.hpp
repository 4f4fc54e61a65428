#pragma once

#include "bid/linalg.hpp"
#include "bid/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bid {

enum class Variant { gbt, gbtn };

/// Fixed prior parameters and run controls of the Bayesian ID samplers.
struct Hyperparameters {
  // Magnitude bounds of Y (the GTN truncation interval).
  double a = -1.0;
  double b = 1.0;
  // Inverse-Gamma prior on the noise variance.
  double alpha_sigma = 0.1;
  double beta_sigma = 1.0;
  // GBT: fixed GTN parent mean/precision for every y_kl.
  double gbt_mu = 0.0;
  double gbt_tau = 1.0;
  // GBTN hyperprior: normal on mu_kl, Gamma on tau_kl.
  double mu_mu = 0.0;
  double tau_mu = 0.1;
  double alpha_t = 1.0;
  double beta_t = 1.0;

  std::size_t k = 1;
  std::size_t iterations = 500;
  std::size_t burn_in = 100;
  std::size_t thinning = 5;
  Variant variant = Variant::gbt;
  bool aggressive = false;

  // Stop once the relative MSE change stays below early_stop_tol for
  // early_stop_window consecutive iterations.
  bool early_stop = false;
  double early_stop_tol = 1e-6;
  std::size_t early_stop_window = 20;

  std::size_t probe_count = 5;
  // Run the state validator after every iteration.
  bool check_invariants = false;
};

/// Throws ConfigError unless hp is usable for a data matrix with n columns.
void validate(const Hyperparameters& hp, std::size_t n);

/// Binary column-type vector: bit 1 marks a basis column (set J), 0 an
/// interpolated column (set I).
class StateVector {
public:
  StateVector() = default;
  explicit StateVector(std::vector<std::uint8_t> bits);

  static StateVector random_subset(std::size_t n, std::size_t k, RandomSource& rng);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept;
  bool is_basis(std::size_t n) const { return bits_[n] != 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::vector<std::size_t> basis() const;
  std::vector<std::size_t> interpolated() const;

  /// Moves column j out of the basis and column i into it.
  void swap_in(std::size_t j, std::size_t i);

  bool operator==(const StateVector&) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

/// Data matrix with an observation mask; unobserved cells hold 0.
struct ObservedMatrix {
  DenseMatrix values;
  std::vector<std::uint8_t> observed;

  ObservedMatrix() = default;
  /// Fully observed.
  explicit ObservedMatrix(DenseMatrix v);
  ObservedMatrix(DenseMatrix v, std::vector<std::uint8_t> mask);

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
  bool is_observed(std::size_t i, std::size_t j) const { return observed[i * cols() + j] != 0; }
  std::size_t observed_count() const noexcept;

  bool operator==(const ObservedMatrix&) const = default;
};

/// Full sampler state.
struct IdState {
  DenseMatrix x;        // M x N, X[:,J] = A[:,J], X[:,I] = 0
  DenseMatrix y;        // N x N, entries in [a, b]
  StateVector r;
  double sigma2 = 1.0;
  DenseMatrix gtn_mu;   // N x N parent means
  DenseMatrix gtn_tau;  // N x N parent precisions

  bool operator==(const IdState&) const = default;
};

/// Random initialization: uniform K-subset for r, prior draws for everything else.
IdState init_state(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng);

/// X[:,J] = A[:,J], X[:,I] = 0 for the current r.
void rebuild_x(IdState& state, const DenseMatrix& a);
DenseMatrix build_x(const DenseMatrix& a, const StateVector& r);

/// Throws NumericalError naming the first violated state invariant.
void validate_state(const IdState& state, const ObservedMatrix& data, const Hyperparameters& hp);

} // namespace bid
