#pragma once

#include "bid/linalg.hpp"
#include "bid/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bid {

/// (1/MN) sum (a_mn - x_m^T y_n)^2.
double mse(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& y);
/// Same, averaged over observed cells only. Throws InputError on an empty mask.
double mse_observed(const ObservedMatrix& data, const DenseMatrix& x, const DenseMatrix& y);
/// MSE of an explicit reconstruction.
double mse_of(const DenseMatrix& a, const DenseMatrix& approx);
double mse_observed_of(const ObservedMatrix& data, const DenseMatrix& approx);

/// Biased (divide-by-n) sample autocorrelation at lags 0..max_lag.
/// Throws NumericalError for a constant chain.
std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag);

/// Mean of trace entries at 0-based indices burn_in, burn_in + thinning, ...
double posterior_mean_loss(std::span<const double> trace, std::size_t burn_in,
                           std::size_t thinning);

struct PlateauRule {
  double tol = 1e-4;
  std::size_t window = 10;
};

/// 1-based iteration t after which the relative change |m_s - m_{s-1}| / |m_{s-1}|
/// stays below tol for s = t+1 .. t+window. Empty when no such iteration exists.
std::optional<std::size_t> iterations_to_plateau(std::span<const double> trace,
                                                 PlateauRule rule = {});

struct ProbeDiagnostic {
  std::string name;
  std::vector<double> autocorr;  // empty when degenerate
  std::string error;             // set for degenerate chains
};

struct RunReport {
  double mse_final = 0.0;
  double mse_observed_final = 0.0;
  double mse_posterior_mean = 0.0;
  std::vector<ProbeDiagnostic> probes;
  std::optional<std::size_t> iterations_to_plateau;
  bool mixing_good = false;
};

/// Mixing criterion: every lag beyond min_lag has |autocorr| below threshold.
bool chain_mixes(std::span<const double> autocorr, std::size_t min_lag, double threshold);

} // namespace bid
