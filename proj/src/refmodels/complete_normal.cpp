#include "saem/refmodels/complete_normal.hpp"

#include "saem/normal.hpp"

#include <numeric>

namespace saem::refmodels {

CompleteDataNormalModel::CompleteDataNormalModel(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw DataFormatError("complete normal model: no observations");
  sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
}

double CompleteDataNormalModel::complete_loglik(const ParamVector& theta, const Latent&) const {
  const double mu = theta[0];
  double ll = 0.0;
  for (double x : values_) {
    const double e = x - mu;
    ll += -0.5 * e * e - kLogSqrt2Pi;
  }
  return ll;
}

Vector CompleteDataNormalModel::score(const ParamVector& theta, const Latent&) const {
  Vector s(1);
  s[0] = sum_ - static_cast<double>(values_.size()) * theta[0];
  return s;
}

Matrix CompleteDataNormalModel::complete_info(const ParamVector&, const Latent&) const {
  Matrix info(1, 1);
  info(0, 0) = static_cast<double>(values_.size());
  return info;
}

ConditionalMoments CompleteDataNormalModel::exact_conditional_expectations(
    const ParamVector& theta) const {
  ConditionalMoments cm;
  cm.score_mean = score(theta, Latent{});
  cm.info_minus_score_sq =
      complete_info(theta, Latent{}) - cm.score_mean * cm.score_mean.transpose();
  return cm;
}

double CompleteDataNormalModel::exact_marginal_loglik(const ParamVector& theta) const {
  return complete_loglik(theta, Latent{});
}

ParamVector CompleteDataNormalModel::exact_em_step(const ParamVector&) const {
  ParamVector next(1);
  next[0] = sample_mean();
  return next;
}

}  // namespace saem::refmodels
