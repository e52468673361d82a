#include "saem/normal.hpp"

#include <cmath>

namespace saem {

double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double norm_logpdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double norm_sf(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

double norm_logsf(double z) {
  // erfc underflows near z ~ 37.5; switch to the asymptotic expansion of the
  // upper tail well before that.
  if (z < 30.0) {
    double s = norm_sf(z);
    if (s > 0.0) return std::log(s);
  }
  // log Phi-bar(z) ~ -z^2/2 - log(z sqrt(2 pi)) + log(1 - 1/z^2 + 3/z^4)
  double z2 = z * z;
  return -0.5 * z2 - std::log(z) - kLogSqrt2Pi + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

// Wichura (1988), algorithm AS 241, routine PPND16. Relative accuracy about
// 1e-16 over the full open interval.
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -v : v;
}

double mills_lambda(double a) {
  if (a > 30.0) {
    // lambda(a) = a + 1/a - 2/a^3 + O(a^-5)
    return a + 1.0 / a - 2.0 / (a * a * a);
  }
  return norm_pdf(a) / norm_sf(a);
}

TruncatedMoments truncated_normal_lower_moments(double mu, double sigma, double a) {
  const double alpha = (a - mu) / sigma;
  const double lam = mills_lambda(alpha);
  TruncatedMoments m;
  m.mean = mu + sigma * lam;
  m.var = sigma * sigma * (1.0 + alpha * lam - lam * lam);
  if (m.var < 0.0) m.var = 0.0;  // rounding in the far tail
  return m;
}

double sample_truncated_normal_lower(double mu, double sigma, double a, Rng& rng) {
  const double alpha = (a - mu) / sigma;
  const double u = rng.uniform();
  // P(Z > z) = (1-u) * P(Z > alpha); invert via the lower-tail quantile of -Z.
  const double tail = (1.0 - u) * norm_sf(alpha);
  double z;
  if (tail > 0.0) {
    z = -norm_quantile(tail);
  } else {
    // (1-u)*sf underflowed: fall back to the asymptotic tail inverse.
    const double logq = std::log1p(-u) + norm_logsf(alpha);
    z = std::sqrt(-2.0 * logq);
  }
  if (z < alpha) z = alpha;  // guard against rounding below the bound
  return mu + sigma * z;
}

}  // namespace saem
