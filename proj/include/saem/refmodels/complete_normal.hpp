#pragma once

#include "saem/model.hpp"
#include "saem/types.hpp"

#include <vector>

namespace saem::refmodels {

// N(mu, 1) with nothing missing: the latent space is a single point, so every
// conditional expectation is the complete-data quantity itself. theta = (mu).
// Exercises the engine's degeneracy to Newton-Raphson on the observed
// log-likelihood.
class CompleteDataNormalModel {
 public:
  struct Latent {};  // single-point latent space

  explicit CompleteDataNormalModel(std::vector<double> values);

  Eigen::Index dim() const { return 1; }
  std::size_t num_obs() const { return values_.size(); }
  ParamBounds bounds() const { return ParamBounds::unbounded(1); }

  double complete_loglik(const ParamVector& theta, const Latent&) const;
  Vector score(const ParamVector& theta, const Latent&) const;
  Matrix complete_info(const ParamVector& theta, const Latent&) const;
  Proposal<Latent> propose(const ParamVector&, const Latent&, Rng&) const {
    return {Latent{}, 0.0};
  }
  Latent init_latent(const ParamVector&, Rng&) const { return Latent{}; }

  ConditionalMoments exact_conditional_expectations(const ParamVector& theta) const;

  double exact_marginal_loglik(const ParamVector& theta) const;
  ParamVector exact_em_step(const ParamVector& theta) const;

  double sample_mean() const { return sum_ / static_cast<double>(values_.size()); }

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
};

}  // namespace saem::refmodels
