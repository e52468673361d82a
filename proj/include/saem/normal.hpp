#pragma once

#include "saem/types.hpp"

namespace saem {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

double norm_pdf(double z);
double norm_logpdf(double z);
double norm_cdf(double z);
// Upper tail P(Z > z), accurate for large z (erfc-based).
double norm_sf(double z);
double norm_logsf(double z);
// Inverse standard normal CDF (Wichura AS 241, double precision).
double norm_quantile(double p);

// Inverse Mills ratio phi(a)/(1 - Phi(a)); stable into the far upper tail.
double mills_lambda(double a);

// Mean and variance of Z ~ N(mu, sigma^2) conditioned on Z > a.
struct TruncatedMoments {
  double mean;
  double var;
};
TruncatedMoments truncated_normal_lower_moments(double mu, double sigma, double a);

// Inverse-CDF draw from N(mu, sigma^2) truncated to (a, inf).
double sample_truncated_normal_lower(double mu, double sigma, double a, Rng& rng);

}  // namespace saem
