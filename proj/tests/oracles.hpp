// Reference computations used only by the tests. Nothing here calls into the
// library's density or CDF code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double eps,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Integrands carry roughly 1e-14 relative roundoff.
  const double floor = 1e-13 * (std::abs(left) + std::abs(right));
  if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(eps, floor))
    return left + right + delta / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

/// Adaptive Simpson quadrature of f over the finite interval [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13, int depth = 30) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, eps, depth);
}

/// Integral over [lo, hi] split into equal panels, each integrated adaptively.
inline double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                               int panels, double eps = 1e-14) {
  double s = 0.0;
  const double h = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) s += integrate(f, lo + i * h, lo + (i + 1) * h, eps / panels);
  return s;
}

inline double std_normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Phi(x) by quadrature of the density (x >= -12).
inline double phi_by_quadrature(double x) {
  if (x >= 0.0) return 0.5 + integrate(std_normal_density, 0.0, x, 1e-15);
  return 0.5 - integrate(std_normal_density, x, 0.0, 1e-15);
}

/// Upper-tail Mills-ratio bounds: phi(x) x/(1+x^2) < 1 - Phi(x) < phi(x)/x for x > 0.
inline double upper_tail_upper_bound(double x) { return std_normal_density(x) / x; }
inline double upper_tail_lower_bound(double x) {
  return std_normal_density(x) * x / (1.0 + x * x);
}

/// Truncated normal on [a, b] (a, b may be infinite) represented by an
/// unnormalized density that peaks at 1 on its support.
struct TruncatedNormal {
  double mu, tau, a, b;

  double nearest() const { return std::clamp(mu, a, b); }
  double lo() const { return std::isfinite(a) ? a : nearest() - 40.0 / std::sqrt(tau); }
  double hi() const { return std::isfinite(b) ? b : nearest() + 40.0 / std::sqrt(tau); }
  double kernel(double x) const {
    const double d0 = nearest() - mu;
    const double d = x - mu;
    return std::exp(-0.5 * tau * (d * d - d0 * d0));
  }
  // Effective support where the kernel is above e^-400 of its peak.
  double support_lo() const {
    return std::max(lo(), nearest() - std::sqrt(800.0 / tau + (nearest() - mu) * (nearest() - mu)) -
                              std::abs(nearest() - mu));
  }
  double support_hi() const {
    return std::min(hi(), nearest() + std::sqrt(800.0 / tau + (nearest() - mu) * (nearest() - mu)) +
                              std::abs(nearest() - mu));
  }
  double normalizer() const {
    return integrate_panels([this](double x) { return kernel(x); }, support_lo(), support_hi(),
                            64);
  }
  double mean() const {
    const double z = normalizer();
    return integrate_panels([this](double x) { return x * kernel(x); }, support_lo(),
                            support_hi(), 64) /
           z;
  }
};

/// Analytic CDF values at sorted points for a truncated normal, by cumulative
/// Simpson between consecutive points.
inline std::vector<double> cdf_at_sorted(const TruncatedNormal& t, const std::vector<double>& xs) {
  const double z = t.normalizer();
  std::vector<double> out(xs.size());
  double acc = 0.0;
  double prev = t.support_lo();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::max(xs[i], prev);
    if (x > prev) acc += integrate([&](double u) { return t.kernel(u); }, prev, x, 1e-12);
    prev = x;
    out[i] = std::min(1.0, acc / z);
  }
  return out;
}

/// One-sample Kolmogorov-Smirnov statistic from sorted draws and their CDF values.
inline double ks_statistic(const std::vector<double>& cdf_sorted) {
  const double n = static_cast<double>(cdf_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_sorted.size(); ++i) {
    d = std::max(d, std::abs(cdf_sorted[i] - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf_sorted[i]));
  }
  return d;
}

inline double ks_statistic(std::vector<double> sorted_draws,
                           const std::function<double(double)>& cdf) {
  std::sort(sorted_draws.begin(), sorted_draws.end());
  std::vector<double> c(sorted_draws.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cdf(sorted_draws[i]);
  return ks_statistic(c);
}

inline double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

/// 1% critical value of the one-sample KS statistic (asymptotic).
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

/// Total-variation distance between draws and a density on [lo, hi], using
/// equal-width bins and the density integrated over each bin.
inline double tv_distance(const std::vector<double>& draws, const std::function<double(double)>& density,
                          double lo, double hi, int bins) {
  std::vector<double> mass(bins);
  const double h = (hi - lo) / bins;
  double total = 0.0;
  for (int i = 0; i < bins; ++i) {
    mass[i] = integrate(density, lo + i * h, lo + (i + 1) * h, 1e-12);
    total += mass[i];
  }
  std::vector<double> counts(bins, 0.0);
  for (double v : draws) {
    int idx = static_cast<int>((v - lo) / h);
    idx = std::clamp(idx, 0, bins - 1);
    counts[idx] += 1.0;
  }
  double tv = 0.0;
  for (int i = 0; i < bins; ++i) tv += std::abs(counts[i] / draws.size() - mass[i] / total);
  return 0.5 * tv;
}

} // namespace oracle
