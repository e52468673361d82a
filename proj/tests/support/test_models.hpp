#pragma once

#include "saem/model.hpp"
#include "saem/normal.hpp"
#include "saem/types.hpp"

#include <cmath>
#include <vector>

namespace saem::testing {

// K-state latent space with arbitrary unnormalized log-weights and a uniform
// proposal over the other K-1 states. The dummy parameter carries zero
// score/information; the model exists to exercise the MH kernel exactly.
class FiniteStateModel {
 public:
  using Latent = int;

  explicit FiniteStateModel(std::vector<double> log_weights)
      : log_weights_(std::move(log_weights)) {}

  Eigen::Index dim() const { return 1; }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(1); }

  double complete_loglik(const ParamVector&, const Latent& z) const {
    return log_weights_[static_cast<std::size_t>(z)];
  }
  Vector score(const ParamVector&, const Latent&) const { return Vector::Zero(1); }
  Matrix complete_info(const ParamVector&, const Latent&) const { return Matrix::Zero(1, 1); }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng& rng) const {
    const int k = static_cast<int>(log_weights_.size());
    int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
    if (other >= z) ++other;
    return {other, 0.0};
  }
  Latent init_latent(const ParamVector&, Rng& rng) const {
    return static_cast<int>(rng.below(log_weights_.size()));
  }

  int n_states() const { return static_cast<int>(log_weights_.size()); }
  const std::vector<double>& log_weights() const { return log_weights_; }

 private:
  std::vector<double> log_weights_;
};

// Latent z | x ~ N(0, 1) with a random-walk proposal of step 2.4.
class GaussianLatentModel {
 public:
  using Latent = double;

  Eigen::Index dim() const { return 1; }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(1); }

  double complete_loglik(const ParamVector&, const Latent& z) const { return -0.5 * z * z; }
  Vector score(const ParamVector&, const Latent&) const { return Vector::Zero(1); }
  Matrix complete_info(const ParamVector&, const Latent&) const { return Matrix::Zero(1, 1); }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng& rng) const {
    return {z + 2.4 * rng.normal(), 0.0};
  }
  Latent init_latent(const ParamVector&, Rng& rng) const { return rng.normal(); }
};

// Degenerate model whose score is a fixed vector c and information is zero
// (complete log-likelihood linear in theta).
class ConstantScoreModel {
 public:
  using Latent = int;

  explicit ConstantScoreModel(Vector c) : c_(std::move(c)) {}

  Eigen::Index dim() const { return c_.size(); }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(c_.size()); }

  double complete_loglik(const ParamVector& theta, const Latent&) const {
    return c_.dot(theta);
  }
  Vector score(const ParamVector&, const Latent&) const { return c_; }
  Matrix complete_info(const ParamVector&, const Latent&) const {
    return Matrix::Zero(c_.size(), c_.size());
  }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng&) const { return {z, 0.0}; }
  Latent init_latent(const ParamVector&, Rng&) const { return 0; }

 private:
  Vector c_;
};

// Exponential-rate model with the open bound theta > 0 (the rate itself is
// the parameter, deliberately untransformed) to exercise step backtracking.
class BoundedExpModel {
 public:
  struct Latent {};

  explicit BoundedExpModel(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) sum_ += v;
  }

  Eigen::Index dim() const { return 1; }
  std::size_t num_obs() const { return values_.size(); }
  ParamBounds bounds() const {
    ParamBounds b = ParamBounds::unbounded(1);
    b.lower[0] = 0.0;
    return b;
  }

  double complete_loglik(const ParamVector& theta, const Latent&) const {
    const double rate = theta[0];
    if (!(rate > 0.0)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(values_.size()) * std::log(rate) - rate * sum_;
  }
  Vector score(const ParamVector& theta, const Latent&) const {
    Vector s(1);
    s[0] = static_cast<double>(values_.size()) / theta[0] - sum_;
    return s;
  }
  Matrix complete_info(const ParamVector& theta, const Latent&) const {
    Matrix info(1, 1);
    info(0, 0) = static_cast<double>(values_.size()) / (theta[0] * theta[0]);
    return info;
  }
  Proposal<Latent> propose(const ParamVector&, const Latent&, Rng&) const {
    return {Latent{}, 0.0};
  }
  Latent init_latent(const ParamVector&, Rng&) const { return Latent{}; }

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
};

// Wraps a model but reports twice its score (a deliberately broken contract
// for validate_model).
template <class Inner>
class DoubledScoreModel {
 public:
  using Latent = typename Inner::Latent;

  explicit DoubledScoreModel(Inner inner) : inner_(std::move(inner)) {}

  Eigen::Index dim() const { return inner_.dim(); }
  std::size_t num_obs() const { return inner_.num_obs(); }
  ParamBounds bounds() const { return inner_.bounds(); }
  double complete_loglik(const ParamVector& t, const Latent& z) const {
    return inner_.complete_loglik(t, z);
  }
  Vector score(const ParamVector& t, const Latent& z) const { return 2.0 * inner_.score(t, z); }
  Matrix complete_info(const ParamVector& t, const Latent& z) const {
    return inner_.complete_info(t, z);
  }
  Proposal<Latent> propose(const ParamVector& t, const Latent& z, Rng& rng) const {
    return inner_.propose(t, z, rng);
  }
  Latent init_latent(const ParamVector& t, Rng& rng) const { return inner_.init_latent(t, rng); }

 private:
  Inner inner_;
};

}  // namespace saem::testing
