#pragma once

#include "saem/model.hpp"
#include "saem/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace saem::refmodels {

// One data row; at most one coordinate may be missing.
struct BivariatePair {
  std::optional<double> x1;
  std::optional<double> x2;
};

using BivariateData = std::vector<BivariatePair>;

// Bivariate normal with some pairs missing one coordinate.
// theta = (mu1, mu2, log sigma1, log sigma2, atanh rho); the latent state
// holds the missing coordinates (those missing x2 first, then those
// missing x1).
class BivariateNormalMissingModel {
 public:
  using Latent = std::vector<double>;

  explicit BivariateNormalMissingModel(BivariateData data);

  Eigen::Index dim() const { return 5; }
  std::size_t num_obs() const { return n_; }
  std::size_t num_missing() const { return miss2_.size() + miss1_.size(); }
  ParamBounds bounds() const { return ParamBounds::unbounded(5); }

  double complete_loglik(const ParamVector& theta, const Latent& z) const;
  Vector score(const ParamVector& theta, const Latent& z) const;
  Matrix complete_info(const ParamVector& theta, const Latent& z) const;
  // Independence proposal from the exact one-dimensional conditional normals.
  Proposal<Latent> propose(const ParamVector& theta, const Latent& z, Rng& rng) const;
  Latent init_latent(const ParamVector& theta, Rng& rng) const;

  double exact_marginal_loglik(const ParamVector& theta) const;
  // Closed-form EM step via conditional-normal imputation moments.
  ParamVector exact_em_step(const ParamVector& theta) const;

  ParamVector default_init() const;

  static BivariateData generate(double mu1, double mu2, double sigma1, double sigma2,
                                double rho, std::size_t n, double miss_frac,
                                std::uint64_t seed);

 private:
  std::vector<std::pair<double, double>> complete_;
  std::vector<double> miss2_;  // x1 observed, x2 latent
  std::vector<double> miss1_;  // x2 observed, x1 latent
  std::size_t n_ = 0;

  double latent_conditional_logpdf(const ParamVector& theta, const Latent& z) const;
};

}  // namespace saem::refmodels
