#pragma once

#include "saem/model.hpp"
#include "saem/types.hpp"

#include <cstdint>
#include <vector>

namespace saem::refmodels {

// One observation unit: either a fully observed value, or the knowledge that
// the value exceeds a known threshold. For censored rows `value` records the
// threshold itself.
struct CensoredObservation {
  double value = 0.0;
  bool censored = false;
};

using CensoredData = std::vector<CensoredObservation>;

// N(mu, sigma^2) with right censoring at known per-unit thresholds.
// theta = (mu, log sigma); the latent state holds the true values of the
// censored units, constrained above their thresholds.
class CensoredNormalModel {
 public:
  using Latent = std::vector<double>;

  explicit CensoredNormalModel(CensoredData data);

  Eigen::Index dim() const { return 2; }
  std::size_t num_obs() const { return n_; }
  std::size_t num_censored() const { return thresholds_.size(); }
  ParamBounds bounds() const { return ParamBounds::unbounded(2); }

  double complete_loglik(const ParamVector& theta, const Latent& z) const;
  Vector score(const ParamVector& theta, const Latent& z) const;
  Matrix complete_info(const ParamVector& theta, const Latent& z) const;
  // Independence proposal: refresh every censored value from its exact
  // truncated-normal conditional at the current theta. The log proposal
  // ratio cancels the likelihood ratio, so the MH acceptance is one; the
  // ratio is still computed and handed to the engine.
  Proposal<Latent> propose(const ParamVector& theta, const Latent& z, Rng& rng) const;
  Latent init_latent(const ParamVector& theta, Rng& rng) const;

  // Exact observed-data log-likelihood (normal densities + upper-tail masses).
  double exact_marginal_loglik(const ParamVector& theta) const;
  // Closed-form EM step via truncated-normal conditional moments.
  ParamVector exact_em_step(const ParamVector& theta) const;

  // Moment-based starting point treating censored rows at their thresholds.
  ParamVector default_init() const;

  // Synthetic right-censored sample: n draws from N(mu, sigma^2), the largest
  // ceil(censor_frac * n) of which are censored at the empirical quantile.
  static CensoredData generate(double mu, double sigma, std::size_t n, double censor_frac,
                               std::uint64_t seed);

 private:
  std::vector<double> observed_;    // uncensored values
  std::vector<double> thresholds_;  // censoring thresholds c_j, one per latent
  std::size_t n_ = 0;

  double latent_conditional_logpdf(const ParamVector& theta, const Latent& z) const;
};

}  // namespace saem::refmodels
