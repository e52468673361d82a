#pragma once

#include "saem/model.hpp"
#include "saem/types.hpp"

#include <cstdint>
#include <vector>

namespace saem::refmodels {

// Two-component Gaussian mixture with known unit variances.
// theta = (logit pi, mu1, mu2); latent state = component labels. Labels are
// stored 0-based: 0 picks (pi, mu1), 1 picks (1-pi, mu2).
class MixtureModel {
 public:
  using Latent = std::vector<std::uint8_t>;

  explicit MixtureModel(std::vector<double> values);

  Eigen::Index dim() const { return 3; }
  std::size_t num_obs() const { return values_.size(); }
  ParamBounds bounds() const { return ParamBounds::unbounded(3); }

  double complete_loglik(const ParamVector& theta, const Latent& z) const;
  Vector score(const ParamVector& theta, const Latent& z) const;
  Matrix complete_info(const ParamVector& theta, const Latent& z) const;
  // Random single-label flip; symmetric, so the log proposal ratio is zero.
  Proposal<Latent> propose(const ParamVector& theta, const Latent& z, Rng& rng) const;
  // Labels drawn from their exact responsibilities at theta.
  Latent init_latent(const ParamVector& theta, Rng& rng) const;

  // Labels are conditionally independent given x, so all conditional moments
  // have closed per-unit forms.
  ConditionalMoments exact_conditional_expectations(const ParamVector& theta) const;

  double exact_marginal_loglik(const ParamVector& theta) const;
  ParamVector exact_em_step(const ParamVector& theta) const;

  ParamVector default_init() const;

  const std::vector<double>& values() const { return values_; }

  static std::vector<double> generate(double pi, double mu1, double mu2, std::size_t n,
                                      std::uint64_t seed);

 private:
  std::vector<double> values_;

  // P(label = 0 | x_k, theta) for every unit.
  std::vector<double> responsibilities(const ParamVector& theta) const;
};

}  // namespace saem::refmodels
