#pragma once

#include "saem/model.hpp"
#include "saem/sampler.hpp"
#include "saem/types.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace saem {

inline constexpr int kBatchCount = 20;

// Monte-Carlo estimate of the observed-data score s(theta; x) = E[S | x, theta],
// with batch-means standard errors (chain draws are autocorrelated, so a
// naive variance would understate the error).
struct ScoreEstimate {
  Vector score;
  Vector mc_se;
  std::int64_t mc_draws = 0;
};

// Observed-information estimate via the Louis decomposition
//   -d^2 log L = E[I - S S^T | x, theta] + s s^T
// evaluated over one long chain at fixed theta.
struct InformationEstimate {
  Matrix obs_info;
  Vector score;
  Vector score_mc_se;
  std::int64_t mc_draws = 0;
  bool condition_flag = false;  // obs_info positive definite
};

namespace detail {

// Shared accumulation pass: burn, then n_draws states with running sums and
// per-batch score sums over the first B*L draws.
template <IncompleteDataModel M>
struct ChainAccumulator {
  Vector sum_score;
  Matrix sum_info;
  Matrix sum_outer;
  std::vector<Vector> batch_sums;
  std::int64_t batch_len = 0;
  std::int64_t n = 0;

  ChainAccumulator(const M& m, const ParamVector& theta, std::int64_t n_draws,
                   std::int64_t burn, std::uint64_t seed, bool want_info) {
    const Eigen::Index p = m.dim();
    sum_score = Vector::Zero(p);
    sum_info = Matrix::Zero(p, p);
    sum_outer = Matrix::Zero(p, p);

    const int n_batches = static_cast<int>(std::min<std::int64_t>(kBatchCount, n_draws));
    batch_len = n_draws / n_batches;
    batch_sums.assign(n_batches, Vector::Zero(p));

    ChainState<M> chain = init_chain(m, theta, seed);
    for (std::int64_t k = 0; k < burn; ++k) mh_step(m, theta, chain);

    for (std::int64_t k = 0; k < n_draws; ++k) {
      mh_step(m, theta, chain);
      const Vector s = eval_score_checked(m, theta, chain.current);
      if (!all_finite(s)) throw NonFiniteEvaluation("score non-finite in estimation chain");
      sum_score += s;
      const std::int64_t b = k / batch_len;
      if (b < n_batches) batch_sums[static_cast<std::size_t>(b)] += s;
      if (want_info) {
        const Matrix info = eval_info_checked(m, theta, chain.current);
        if (!all_finite(info)) throw NonFiniteEvaluation("info non-finite in estimation chain");
        sum_info += info;
        sum_outer += s * s.transpose();
      }
      ++n;
    }
  }

  Vector mean_score() const { return sum_score / static_cast<double>(n); }

  Vector batch_means_se() const {
    const int nb = static_cast<int>(batch_sums.size());
    const Eigen::Index p = sum_score.size();
    if (nb < 2) return Vector::Zero(p);
    Matrix means(nb, p);
    for (int b = 0; b < nb; ++b) {
      means.row(b) = batch_sums[static_cast<std::size_t>(b)].transpose() /
                     static_cast<double>(batch_len);
    }
    Vector se(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double mu = means.col(j).mean();
      const double ss = (means.col(j).array() - mu).square().sum() / (nb - 1);
      se[j] = std::sqrt(ss / nb);
    }
    return se;
  }
};

}  // namespace detail

// Fresh chain at fixed theta; `burn` discarded transitions, then the mean
// score over n_draws states.
template <IncompleteDataModel M>
ScoreEstimate estimate_score(const M& m, const ParamVector& theta, std::int64_t n_draws,
                             std::int64_t burn, std::uint64_t seed) {
  if (n_draws < 1) throw SaemError("estimate_score: M must be >= 1");
  detail::ChainAccumulator<M> acc(m, theta, n_draws, burn, seed, /*want_info=*/false);
  ScoreEstimate est;
  est.score = acc.mean_score();
  est.mc_se = acc.batch_means_se();
  est.mc_draws = acc.n;
  return est;
}

template <IncompleteDataModel M>
InformationEstimate louis_information(const M& m, const ParamVector& theta,
                                      std::int64_t n_draws, std::int64_t burn,
                                      std::uint64_t seed) {
  if (n_draws < 2) throw SaemError("louis_information: M must be >= 2");
  detail::ChainAccumulator<M> acc(m, theta, n_draws, burn, seed, /*want_info=*/true);

  InformationEstimate est;
  est.score = acc.mean_score();
  est.score_mc_se = acc.batch_means_se();
  est.mc_draws = acc.n;

  const double inv_n = 1.0 / static_cast<double>(acc.n);
  Matrix obs = acc.sum_info * inv_n - acc.sum_outer * inv_n + est.score * est.score.transpose();
  est.obs_info = 0.5 * (obs + obs.transpose());

  Eigen::LLT<Matrix> llt(est.obs_info);
  est.condition_flag = (llt.info() == Eigen::Success);
  return est;
}

// sqrt(diag(obs_info^{-1})). Requires a positive definite estimate; the
// caller should increase M or inspect the model otherwise.
inline Vector standard_errors(const InformationEstimate& info) {
  if (!info.condition_flag) {
    throw IndefiniteInformation("observed information is not positive definite");
  }
  Eigen::LLT<Matrix> llt(info.obs_info);
  if (llt.info() != Eigen::Success) {
    throw IndefiniteInformation("observed information factorization failed");
  }
  const Matrix inv =
      llt.solve(Matrix::Identity(info.obs_info.rows(), info.obs_info.cols()));
  Vector se = inv.diagonal().cwiseSqrt();
  if (!all_finite(se) || (se.array() <= 0.0).any()) {
    throw IndefiniteInformation("standard errors are not positive finite");
  }
  return se;
}

}  // namespace saem
