#pragma once

#include "bid/random.hpp"

namespace bid {

/// Normal distribution with mean `mu` and precision `tau`, truncated to [a, b].
/// Either bound may be infinite; a = 0, b = +inf is the one-sided truncated normal.
struct GtnParams {
  double mu = 0.0;
  double tau = 1.0;
  double a = -1.0;
  double b = 1.0;
};

/// Shape/rate pair shared by the Gamma and inverse-Gamma distributions.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

void validate(const GtnParams& p);
void validate(const GammaParams& p);

/// Standard normal CDF, computed through erfc so both tails keep relative accuracy.
double normal_cdf(double x);
/// Upper tail 1 - Phi(x) without cancellation.
double normal_sf(double x);
double normal_log_pdf(double x);
/// Inverse of the standard normal CDF on (0, 1).
double normal_quantile(double p);

/// Log of Phi(beta) - Phi(alpha) for standardized bounds alpha < beta.
/// Throws NumericalError when the mass underflows to zero.
double log_normal_mass(double alpha, double beta);

double gtn_log_pdf(double x, const GtnParams& p);
double gtn_cdf(double x, const GtnParams& p);
double gtn_mean(const GtnParams& p);
double sample_gtn(const GtnParams& p, RandomSource& rng);

double gamma_log_pdf(double x, const GammaParams& p);
double inverse_gamma_log_pdf(double x, const GammaParams& p);
double sample_gamma(const GammaParams& p, RandomSource& rng);
double sample_inverse_gamma(const GammaParams& p, RandomSource& rng);

/// Normal with mean `mean` and precision `precision`.
double sample_normal(double mean, double precision, RandomSource& rng);

} // namespace bid
