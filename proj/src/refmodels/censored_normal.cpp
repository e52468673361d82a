#include "saem/refmodels/censored_normal.hpp"

#include "saem/normal.hpp"

#include <algorithm>
#include <cmath>

namespace saem::refmodels {

CensoredNormalModel::CensoredNormalModel(CensoredData data) {
  for (const CensoredObservation& obs : data) {
    if (!std::isfinite(obs.value)) {
      throw DataFormatError("censored normal: non-finite observation");
    }
    if (obs.censored) {
      thresholds_.push_back(obs.value);
    } else {
      observed_.push_back(obs.value);
    }
  }
  n_ = observed_.size() + thresholds_.size();
  if (n_ == 0) throw DataFormatError("censored normal: no observations");
}

double CensoredNormalModel::complete_loglik(const ParamVector& theta, const Latent& z) const {
  if (z.size() != thresholds_.size()) {
    throw DimensionMismatch("censored normal: latent size mismatch");
  }
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  double ll = -static_cast<double>(n_) * (theta[1] + kLogSqrt2Pi);
  for (double y : observed_) {
    const double u = (y - mu) / sigma;
    ll -= 0.5 * u * u;
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!(z[j] > thresholds_[j])) return -std::numeric_limits<double>::infinity();
    const double u = (z[j] - mu) / sigma;
    ll -= 0.5 * u * u;
  }
  return ll;
}

// Per unit (theta2 = log sigma, u = (y - mu)/sigma):
//   d l / d mu     = u / sigma
//   d l / d theta2 = u^2 - 1
Vector CensoredNormalModel::score(const ParamVector& theta, const Latent& z) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  double su = 0.0, su2 = 0.0;
  for (double y : observed_) {
    const double u = (y - mu) / sigma;
    su += u;
    su2 += u * u;
  }
  for (double y : z) {
    const double u = (y - mu) / sigma;
    su += u;
    su2 += u * u;
  }
  Vector s(2);
  s[0] = su / sigma;
  s[1] = su2 - static_cast<double>(n_);
  return s;
}

// -Hessian per unit: [[1/sigma^2, 2u/sigma], [2u/sigma, 2u^2]].
Matrix CensoredNormalModel::complete_info(const ParamVector& theta, const Latent& z) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  double su = 0.0, su2 = 0.0;
  for (double y : observed_) {
    const double u = (y - mu) / sigma;
    su += u;
    su2 += u * u;
  }
  for (double y : z) {
    const double u = (y - mu) / sigma;
    su += u;
    su2 += u * u;
  }
  Matrix info(2, 2);
  info(0, 0) = static_cast<double>(n_) / (sigma * sigma);
  info(0, 1) = info(1, 0) = 2.0 * su / sigma;
  info(1, 1) = 2.0 * su2;
  return info;
}

double CensoredNormalModel::latent_conditional_logpdf(const ParamVector& theta,
                                                      const Latent& z) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  double lp = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double u = (z[j] - mu) / sigma;
    const double alpha = (thresholds_[j] - mu) / sigma;
    lp += norm_logpdf(u) - theta[1] - norm_logsf(alpha);
  }
  return lp;
}

Proposal<CensoredNormalModel::Latent> CensoredNormalModel::propose(const ParamVector& theta,
                                                                   const Latent& z,
                                                                   Rng& rng) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  Latent candidate(thresholds_.size());
  for (std::size_t j = 0; j < thresholds_.size(); ++j) {
    candidate[j] = sample_truncated_normal_lower(mu, sigma, thresholds_[j], rng);
  }
  const double log_ratio =
      latent_conditional_logpdf(theta, z) - latent_conditional_logpdf(theta, candidate);
  return {std::move(candidate), log_ratio};
}

CensoredNormalModel::Latent CensoredNormalModel::init_latent(const ParamVector& theta,
                                                             Rng& rng) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  Latent z(thresholds_.size());
  for (std::size_t j = 0; j < thresholds_.size(); ++j) {
    z[j] = sample_truncated_normal_lower(mu, sigma, thresholds_[j], rng);
  }
  return z;
}

double CensoredNormalModel::exact_marginal_loglik(const ParamVector& theta) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  double ll = 0.0;
  for (double y : observed_) {
    const double u = (y - mu) / sigma;
    ll += norm_logpdf(u) - theta[1];
  }
  for (double c : thresholds_) {
    ll += norm_logsf((c - mu) / sigma);
  }
  return ll;
}

ParamVector CensoredNormalModel::exact_em_step(const ParamVector& theta) const {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  // Completed first and second moments; censored units contribute their
  // truncated-normal conditional moments.
  double s1 = 0.0, s2 = 0.0;
  for (double y : observed_) {
    s1 += y;
    s2 += y * y;
  }
  for (double c : thresholds_) {
    const TruncatedMoments tm = truncated_normal_lower_moments(mu, sigma, c);
    s1 += tm.mean;
    s2 += tm.var + tm.mean * tm.mean;
  }
  const double n = static_cast<double>(n_);
  const double mu_new = s1 / n;
  const double var_new = s2 / n - mu_new * mu_new;
  ParamVector next(2);
  next[0] = mu_new;
  next[1] = 0.5 * std::log(var_new);
  return next;
}

ParamVector CensoredNormalModel::default_init() const {
  double s1 = 0.0, s2 = 0.0;
  for (double y : observed_) {
    s1 += y;
    s2 += y * y;
  }
  for (double c : thresholds_) {
    s1 += c;
    s2 += c * c;
  }
  const double n = static_cast<double>(n_);
  const double mean = s1 / n;
  double var = s2 / n - mean * mean;
  if (!(var > 1e-12)) var = 1.0;
  ParamVector theta(2);
  theta[0] = mean;
  theta[1] = 0.5 * std::log(var);
  return theta;
}

CensoredData CensoredNormalModel::generate(double mu, double sigma, std::size_t n,
                                           double censor_frac, std::uint64_t seed) {
  if (n == 0) throw ConfigError("censored normal generator: n must be >= 1");
  if (!(censor_frac >= 0.0 && censor_frac < 1.0)) {
    throw ConfigError("censored normal generator: censor_frac must be in [0, 1)");
  }
  Rng rng(seed);
  std::vector<double> draws(n);
  for (double& d : draws) d = mu + sigma * rng.normal();

  const std::size_t n_cens = static_cast<std::size_t>(std::ceil(censor_frac * n));
  CensoredData data(n);
  if (n_cens == 0) {
    for (std::size_t k = 0; k < n; ++k) data[k] = {draws[k], false};
    return data;
  }
  // Threshold at the empirical (1 - censor_frac) quantile: exactly the
  // n_cens largest draws are censored, all at the same known threshold.
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  const double c = sorted[n - n_cens - 1];
  for (std::size_t k = 0; k < n; ++k) {
    if (draws[k] > c) {
      data[k] = {c, true};
    } else {
      data[k] = {draws[k], false};
    }
  }
  return data;
}

}  // namespace saem::refmodels
