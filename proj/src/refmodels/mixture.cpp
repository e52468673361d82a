#include "saem/refmodels/mixture.hpp"

#include "saem/normal.hpp"

#include <algorithm>
#include <cmath>

namespace saem::refmodels {

namespace {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

MixtureModel::MixtureModel(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataFormatError("mixture model: no observations");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataFormatError("mixture model: non-finite observation");
  }
}

double MixtureModel::complete_loglik(const ParamVector& theta, const Latent& z) const {
  if (z.size() != values_.size()) throw DimensionMismatch("mixture: latent size mismatch");
  const double pi = logistic(theta[0]);
  const double log_pi = std::log(pi);
  const double log_1mpi = std::log1p(-pi);
  double ll = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double e = values_[k] - (z[k] == 0 ? theta[1] : theta[2]);
    ll += (z[k] == 0 ? log_pi : log_1mpi) - 0.5 * e * e - kLogSqrt2Pi;
  }
  return ll;
}

Vector MixtureModel::score(const ParamVector& theta, const Latent& z) const {
  const double pi = logistic(theta[0]);
  double n0 = 0.0, r1 = 0.0, r2 = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (z[k] == 0) {
      n0 += 1.0;
      r1 += values_[k] - theta[1];
    } else {
      r2 += values_[k] - theta[2];
    }
  }
  Vector s(3);
  s[0] = n0 - static_cast<double>(values_.size()) * pi;  // d/d logit(pi)
  s[1] = r1;
  s[2] = r2;
  return s;
}

Matrix MixtureModel::complete_info(const ParamVector& theta, const Latent& z) const {
  const double pi = logistic(theta[0]);
  double n0 = 0.0;
  for (std::uint8_t zk : z) {
    if (zk == 0) n0 += 1.0;
  }
  const double n = static_cast<double>(values_.size());
  Matrix info = Matrix::Zero(3, 3);
  info(0, 0) = n * pi * (1.0 - pi);
  info(1, 1) = n0;
  info(2, 2) = n - n0;
  return info;
}

Proposal<MixtureModel::Latent> MixtureModel::propose(const ParamVector&, const Latent& z,
                                                     Rng& rng) const {
  Latent candidate = z;
  const std::size_t k = static_cast<std::size_t>(rng.below(candidate.size()));
  candidate[k] = static_cast<std::uint8_t>(1 - candidate[k]);
  return {std::move(candidate), 0.0};
}

std::vector<double> MixtureModel::responsibilities(const ParamVector& theta) const {
  const double pi = logistic(theta[0]);
  const double log_pi = std::log(pi);
  const double log_1mpi = std::log1p(-pi);
  std::vector<double> r(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double l0 = log_pi + norm_logpdf(values_[k] - theta[1]);
    const double l1 = log_1mpi + norm_logpdf(values_[k] - theta[2]);
    r[k] = std::exp(l0 - log_add(l0, l1));
  }
  return r;
}

MixtureModel::Latent MixtureModel::init_latent(const ParamVector& theta, Rng& rng) const {
  const std::vector<double> resp = responsibilities(theta);
  Latent z(values_.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = (rng.uniform() < resp[k]) ? 0 : 1;
  }
  return z;
}

// Per-unit score is (1{z=0} - pi, 1{z=0}(x - mu1), 1{z=1}(x - mu2)); the
// conditional expectation and variance over z follow from the responsibility,
// and unit independence makes E[S S^T] = sum Var + E[S] E[S]^T.
ConditionalMoments MixtureModel::exact_conditional_expectations(const ParamVector& theta) const {
  const double pi = logistic(theta[0]);
  const std::vector<double> resp = responsibilities(theta);

  Vector mean = Vector::Zero(3);
  Matrix e_info = Matrix::Zero(3, 3);
  Matrix var_sum = Matrix::Zero(3, 3);
  const double n = static_cast<double>(values_.size());
  e_info(0, 0) = n * pi * (1.0 - pi);

  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double r = resp[k];
    Vector s0(3), s1(3);
    s0 << 1.0 - pi, values_[k] - theta[1], 0.0;
    s1 << -pi, 0.0, values_[k] - theta[2];
    const Vector ek = r * s0 + (1.0 - r) * s1;
    mean += ek;
    var_sum += r * s0 * s0.transpose() + (1.0 - r) * s1 * s1.transpose() - ek * ek.transpose();
    e_info(1, 1) += r;
    e_info(2, 2) += 1.0 - r;
  }

  ConditionalMoments cm;
  cm.score_mean = mean;
  cm.info_minus_score_sq = e_info - var_sum - mean * mean.transpose();
  return cm;
}

double MixtureModel::exact_marginal_loglik(const ParamVector& theta) const {
  const double pi = logistic(theta[0]);
  const double log_pi = std::log(pi);
  const double log_1mpi = std::log1p(-pi);
  double ll = 0.0;
  for (double x : values_) {
    ll += log_add(log_pi + norm_logpdf(x - theta[1]), log_1mpi + norm_logpdf(x - theta[2]));
  }
  return ll;
}

ParamVector MixtureModel::exact_em_step(const ParamVector& theta) const {
  const std::vector<double> resp = responsibilities(theta);
  double sr = 0.0, srx = 0.0, s1x = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    sr += resp[k];
    srx += resp[k] * values_[k];
    s1x += (1.0 - resp[k]) * values_[k];
  }
  const double n = static_cast<double>(values_.size());
  const double pi_new = sr / n;
  ParamVector next(3);
  next[0] = std::log(pi_new) - std::log1p(-pi_new);
  next[1] = srx / sr;
  next[2] = s1x / (n - sr);
  return next;
}

ParamVector MixtureModel::default_init() const {
  // Split at the median; component means from the halves.
  std::vector<double> sorted = values_;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = sorted.size() / 2;
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    (k < half ? lo : hi) += sorted[k];
  }
  ParamVector theta(3);
  theta[0] = 0.0;  // pi = 0.5
  theta[1] = lo / static_cast<double>(half == 0 ? 1 : half);
  theta[2] = hi / static_cast<double>(sorted.size() - half);
  return theta;
}

std::vector<double> MixtureModel::generate(double pi, double mu1, double mu2, std::size_t n,
                                           std::uint64_t seed) {
  if (n == 0) throw ConfigError("mixture generator: n must be >= 1");
  if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("mixture generator: pi must be in (0, 1)");
  Rng rng(seed);
  std::vector<double> values(n);
  for (double& v : values) {
    v = (rng.uniform() < pi ? mu1 : mu2) + rng.normal();
  }
  return values;
}

}  // namespace saem::refmodels
