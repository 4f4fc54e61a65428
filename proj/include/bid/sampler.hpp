#pragma once

#include "bid/distributions.hpp"
#include "bid/model.hpp"
#include "bid/random.hpp"

#include <cstddef>
#include <vector>

namespace bid {

struct ProbePosition {
  std::size_t k = 0;
  std::size_t l = 0;
};

/// Per-iteration record of a sampler run.
struct GibbsTrace {
  std::vector<double> mse_per_iter;
  std::vector<double> mse_observed_per_iter;
  std::vector<double> sigma2_chain;
  std::vector<ProbePosition> probes;
  std::vector<std::vector<double>> y_entry_chains;  // one series per probe
  std::size_t proposed_swaps = 0;
  std::size_t accepted_swaps = 0;

  std::size_t iterations() const noexcept { return mse_per_iter.size(); }
};

struct GibbsRun {
  IdState state;
  GibbsTrace trace;
};

struct NormalParams {
  double mean = 0.0;
  double precision = 1.0;
};

// Closed-form full conditionals. These are exposed so the kernels can be
// checked against independent density evaluations.
GtnParams y_conditional(const IdState& state, const ObservedMatrix& data, std::size_t k,
                        std::size_t l, const Hyperparameters& hp);
GammaParams sigma2_conditional(const IdState& state, const ObservedMatrix& data,
                               const Hyperparameters& hp);
NormalParams mu_conditional(const IdState& state, std::size_t k, std::size_t l,
                            const Hyperparameters& hp);
GammaParams tau_conditional(const IdState& state, std::size_t k, std::size_t l,
                            const Hyperparameters& hp);

/// Residual sum of squares ||A - X Y||_F^2 over all (zero-filled) entries.
double residual_sum_squares(const IdState& state, const DenseMatrix& a);

double sample_y_entry(IdState& state, const ObservedMatrix& data, std::size_t k, std::size_t l,
                      const Hyperparameters& hp, RandomSource& rng);

/// Log-odds of moving column j (basis) out and column i (interpolated) in,
/// with Y and sigma2 held fixed. Evaluated incrementally; clamped to [-700, 700].
double state_swap_odds(const IdState& state, const ObservedMatrix& data, std::size_t j,
                       std::size_t i);
/// Same quantity from two full likelihood evaluations (debug cross-check).
double state_swap_odds_full(const IdState& state, const ObservedMatrix& data, std::size_t j,
                            std::size_t i);

/// One uniform (j, i) swap proposal accepted with probability o/(1+o).
/// Updates state.r and state.x in place; returns whether the swap was taken.
bool sample_state_vector(IdState& state, const ObservedMatrix& data, RandomSource& rng);

double sample_sigma2(IdState& state, const ObservedMatrix& data, const Hyperparameters& hp,
                     RandomSource& rng);
double sample_mu_kl(IdState& state, std::size_t k, std::size_t l, const Hyperparameters& hp,
                    RandomSource& rng);
double sample_tau_kl(IdState& state, std::size_t k, std::size_t l, const Hyperparameters& hp,
                     RandomSource& rng);

/// Samples every y_kl in row-major order (plus mu_kl, tau_kl under GBTN).
void sweep_y(IdState& state, const ObservedMatrix& data, const Hyperparameters& hp,
             RandomSource& rng);

GibbsRun run_gibbs(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng);
GibbsRun run_gibbs_aggressive(const ObservedMatrix& data, const Hyperparameters& hp,
                              RandomSource& rng);
/// Dispatches on hp.aggressive.
GibbsRun run_sampler(const ObservedMatrix& data, const Hyperparameters& hp, RandomSource& rng);

} // namespace bid
