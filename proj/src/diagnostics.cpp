#include "bid/diagnostics.hpp"

#include "bid/error.hpp"

#include <cmath>
#include <string>

namespace bid {

double mse_of(const DenseMatrix& a, const DenseMatrix& approx) {
  if (a.rows() != approx.rows() || a.cols() != approx.cols())
    throw InputError("mse: shape mismatch");
  if (a.empty()) throw InputError("mse: empty matrix");
  double s = 0.0;
  auto lhs = a.data();
  auto rhs = approx.data();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double d = lhs[i] - rhs[i];
    s += d * d;
  }
  return s / static_cast<double>(lhs.size());
}

double mse_observed_of(const ObservedMatrix& data, const DenseMatrix& approx) {
  if (data.rows() != approx.rows() || data.cols() != approx.cols())
    throw InputError("mse_observed: shape mismatch");
  double s = 0.0;
  std::size_t count = 0;
  auto lhs = data.values.data();
  auto rhs = approx.data();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!data.observed[i]) continue;
    const double d = lhs[i] - rhs[i];
    s += d * d;
    ++count;
  }
  if (count == 0) throw InputError("mse_observed: no observed entries");
  return s / static_cast<double>(count);
}

double mse(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != a.rows() || y.cols() != a.cols() || x.cols() != y.rows())
    throw InputError("mse: shape mismatch");
  return mse_of(a, multiply(x, y));
}

double mse_observed(const ObservedMatrix& data, const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != data.rows() || y.cols() != data.cols() || x.cols() != y.rows())
    throw InputError("mse_observed: shape mismatch");
  return mse_observed_of(data, multiply(x, y));
}

std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag) {
  const std::size_t n = chain.size();
  if (n <= max_lag)
    throw InputError("autocorrelation: chain length " + std::to_string(n) +
                     " must exceed max_lag " + std::to_string(max_lag));
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : chain) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0) || c0 <= 1e-300 * static_cast<double>(n))
    throw NumericalError("autocorrelation: degenerate (constant) chain");
  std::vector<double> out(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) c += (chain[t] - mean) * (chain[t + lag] - mean);
    out[lag] = c / c0;
  }
  out[0] = 1.0;
  return out;
}

double posterior_mean_loss(std::span<const double> trace, std::size_t burn_in,
                           std::size_t thinning) {
  if (thinning == 0) throw ConfigError("thinning must be at least 1");
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t t = burn_in; t < trace.size(); t += thinning) {
    s += trace[t];
    ++count;
  }
  if (count == 0) throw InputError("no post-burn-in iterations to average");
  return s / static_cast<double>(count);
}

std::optional<std::size_t> iterations_to_plateau(std::span<const double> trace,
                                                 PlateauRule rule) {
  const std::size_t n = trace.size();
  if (n < rule.window + 1) return std::nullopt;
  // small[s] is true when the step from index s-1 to s is below tolerance.
  std::vector<bool> small(n, false);
  for (std::size_t s = 1; s < n; ++s) {
    const double prev = trace[s - 1];
    const double change = std::abs(trace[s] - prev);
    small[s] = prev != 0.0 ? change / std::abs(prev) < rule.tol : change == 0.0;
  }
  std::size_t run = 0;
  for (std::size_t s = 1; s < n; ++s) {
    run = small[s] ? run + 1 : 0;
    if (run == rule.window) {
      // Steps s-window+1 .. s are small; in 1-based terms the plateau starts at index s-window.
      return s - rule.window + 1;
    }
  }
  return std::nullopt;
}

bool chain_mixes(std::span<const double> autocorr, std::size_t min_lag, double threshold) {
  if (autocorr.size() <= min_lag + 1) return false;
  for (std::size_t lag = min_lag + 1; lag < autocorr.size(); ++lag)
    if (!(std::abs(autocorr[lag]) < threshold)) return false;
  return true;
}

} // namespace bid
