#include "bid/distributions.hpp"

#include "bid/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bid {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double log_sqrt_2pi = 0.91893853320467274178;

// Standardized bounds beyond which the inverse-CDF route is replaced by rejection.
constexpr double tail_threshold = 5.0;

// Draw from N(0,1) restricted to [lo, hi] with lo > 0 deep in the right tail.
double sample_right_tail(double lo, double hi, RandomSource& rng) {
  const double width = hi - lo;
  if (lo * width < 1.0) {
    // Uniform proposal; acceptance is at least exp(-lo*w - w^2/2) relative to the peak at lo.
    for (;;) {
      const double z = lo + width * rng.uniform();
      if (std::log(rng.uniform()) <= 0.5 * (lo * lo - z * z)) return z;
    }
  }
  // Translated exponential proposal with the optimal rate.
  const double lambda = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (;;) {
    const double z = lo - std::log(rng.uniform()) / lambda;
    if (z > hi) continue;
    const double d = z - lambda;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return z;
  }
}

double log_standard_gamma(double shape, RandomSource& rng) {
  if (shape < 1.0) {
    // Boost the shape by one and correct with U^(1/shape), kept in the log domain.
    return log_standard_gamma(shape + 1.0, rng) + std::log(rng.uniform()) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d * v);
  }
}

double clamp_positive(double log_value) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = std::numeric_limits<double>::max();
  if (log_value < std::log(lo)) return lo;
  if (log_value > std::log(hi)) return hi;
  return std::exp(log_value);
}

} // namespace

void validate(const GtnParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.tau) || !(p.tau > 0.0) || std::isnan(p.a) ||
      std::isnan(p.b) || !(p.b > p.a)) {
    throw ConfigError("invalid GTN parameters: mu=" + std::to_string(p.mu) + " tau=" +
                      std::to_string(p.tau) + " a=" + std::to_string(p.a) +
                      " b=" + std::to_string(p.b));
  }
}

void validate(const GammaParams& p) {
  if (!std::isfinite(p.shape) || !std::isfinite(p.rate) || !(p.shape > 0.0) || !(p.rate > 0.0)) {
    throw ConfigError("invalid Gamma parameters: shape=" + std::to_string(p.shape) +
                      " rate=" + std::to_string(p.rate));
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_log_pdf(double x) { return -0.5 * x * x - log_sqrt_2pi; }

double normal_quantile(double p) {
  if (!(p > 0.0)) return -inf;
  if (!(p < 1.0)) return inf;
  if (p > 0.5) return -normal_quantile(1.0 - p);

  // Rational approximation (Acklam), refined by one Halley step against erfc.
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::exp(0.5 * x * x + log_sqrt_2pi);
  return x - u / (1.0 + 0.5 * x * u);
}

double log_normal_mass(double alpha, double beta) {
  if (!(beta > alpha)) throw NumericalError("empty truncation interval");
  double mass;
  if (std::isfinite(alpha) && std::isfinite(beta) && beta - alpha < 1e-7) {
    // Midpoint rule; relative error is O(width^2).
    return normal_log_pdf(0.5 * (alpha + beta)) + std::log(beta - alpha);
  }
  if (alpha >= 0.0) {
    mass = normal_sf(alpha) - normal_sf(beta);
  } else if (beta <= 0.0) {
    mass = normal_cdf(beta) - normal_cdf(alpha);
  } else {
    mass = 1.0 - normal_cdf(alpha) - normal_sf(beta);
  }
  if (!(mass > 0.0)) {
    throw NumericalError("truncated normal mass underflows for standardized bounds [" +
                         std::to_string(alpha) + ", " + std::to_string(beta) + "]");
  }
  return std::log(mass);
}

double gtn_log_pdf(double x, const GtnParams& p) {
  validate(p);
  if (x < p.a || x > p.b) return -inf;
  const double s = std::sqrt(p.tau);
  const double log_z = log_normal_mass((p.a - p.mu) * s, (p.b - p.mu) * s);
  return normal_log_pdf((x - p.mu) * s) + std::log(s) - log_z;
}

double gtn_cdf(double x, const GtnParams& p) {
  validate(p);
  if (x <= p.a) return 0.0;
  if (x >= p.b) return 1.0;
  const double s = std::sqrt(p.tau);
  const double alpha = (p.a - p.mu) * s;
  const double log_z = log_normal_mass(alpha, (p.b - p.mu) * s);
  return std::min(1.0, std::exp(log_normal_mass(alpha, (x - p.mu) * s) - log_z));
}

double gtn_mean(const GtnParams& p) {
  validate(p);
  const double s = std::sqrt(p.tau);
  const double alpha = (p.a - p.mu) * s;
  const double beta = (p.b - p.mu) * s;
  const double log_z = log_normal_mass(alpha, beta);
  const double pa = std::isfinite(alpha) ? std::exp(normal_log_pdf(alpha) - log_z) : 0.0;
  const double pb = std::isfinite(beta) ? std::exp(normal_log_pdf(beta) - log_z) : 0.0;
  return p.mu + (pa - pb) / s;
}

double sample_gtn(const GtnParams& p, RandomSource& rng) {
  validate(p);
  const double s = std::sqrt(p.tau);
  const double alpha = (p.a - p.mu) * s;
  const double beta = (p.b - p.mu) * s;

  double z;
  if (alpha > tail_threshold) {
    z = sample_right_tail(alpha, beta, rng);
  } else if (beta < -tail_threshold) {
    z = -sample_right_tail(-beta, -alpha, rng);
  } else if (alpha >= 0.0) {
    // Work with upper-tail probabilities so small masses keep their precision.
    const double hi = normal_sf(alpha);
    const double lo = normal_sf(beta);
    z = -normal_quantile(lo + rng.uniform() * (hi - lo));
  } else if (beta <= 0.0) {
    const double lo = normal_cdf(alpha);
    const double hi = normal_cdf(beta);
    z = normal_quantile(lo + rng.uniform() * (hi - lo));
  } else {
    const double lo = normal_cdf(alpha);
    const double hi = normal_cdf(beta);
    z = normal_quantile(lo + rng.uniform() * (hi - lo));
  }
  return std::clamp(p.mu + z / s, p.a, p.b);
}

double gamma_log_pdf(double x, const GammaParams& p) {
  if (!(x > 0.0)) return -inf;
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) + (p.shape - 1.0) * std::log(x) -
         p.rate * x;
}

double inverse_gamma_log_pdf(double x, const GammaParams& p) {
  if (!(x > 0.0)) return -inf;
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) - (p.shape + 1.0) * std::log(x) -
         p.rate / x;
}

double sample_gamma(const GammaParams& p, RandomSource& rng) {
  validate(p);
  return clamp_positive(log_standard_gamma(p.shape, rng) - std::log(p.rate));
}

double sample_inverse_gamma(const GammaParams& p, RandomSource& rng) {
  validate(p);
  return clamp_positive(std::log(p.rate) - log_standard_gamma(p.shape, rng));
}

double sample_normal(double mean, double precision, RandomSource& rng) {
  return mean + rng.normal() / std::sqrt(precision);
}

} // namespace bid
