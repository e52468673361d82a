#pragma once

#include "saem/model.hpp"
#include "saem/types.hpp"

#include <cmath>
#include <cstdint>

namespace saem {

inline constexpr int kStuckWindow = 500;
inline constexpr double kStuckRate = 0.01;

// State of one MH chain targeting f(z | x, theta). The cached complete-data
// log-likelihood is tied to the theta most recently used; mh_step re-scores
// automatically when theta changes.
template <IncompleteDataModel M>
struct ChainState {
  typename M::Latent current;
  double current_loglik = 0.0;
  ParamVector scored_at;  // theta the cache was computed for
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
  Rng rng;

  // Diagnostics.
  std::uint64_t nonfinite_candidates = 0;  // NaN candidate log-likelihoods (rejected, flagged)
  bool stuck_warning = false;              // acceptance < 1% over a 500-proposal window
  std::uint64_t stuck_windows = 0;

  std::uint64_t window_proposed = 0;
  std::uint64_t window_accepted = 0;

  ChainState(typename M::Latent z0, std::uint64_t seed)
      : current(std::move(z0)), rng(seed) {}

  double acceptance_rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

// Start a chain from the model's initial latent state at theta.
template <IncompleteDataModel M>
ChainState<M> init_chain(const M& m, const ParamVector& theta, std::uint64_t seed) {
  Rng init_rng(derive_seed(seed, 0));
  ChainState<M> state(m.init_latent(theta, init_rng), derive_seed(seed, 1));
  state.current_loglik = m.complete_loglik(theta, state.current);
  state.scored_at = theta;
  if (!std::isfinite(state.current_loglik)) {
    throw NonFiniteEvaluation("init_latent produced a state with non-finite complete_loglik");
  }
  return state;
}

namespace detail {

template <IncompleteDataModel M>
void ensure_scored(const M& m, const ParamVector& theta, ChainState<M>& state) {
  if (state.scored_at.size() == theta.size() && state.scored_at == theta) return;
  state.current_loglik = m.complete_loglik(theta, state.current);
  state.scored_at = theta;
  // -inf means the warm-start state fell out of the support when theta moved.
  if (!std::isfinite(state.current_loglik)) {
    throw NonFiniteEvaluation("current state has non-finite complete_loglik under new theta");
  }
}

}  // namespace detail

// One Metropolis-Hastings transition. Since f(z|x,theta) is proportional to
// f(x,z;theta), the acceptance probability is
//   min(1, exp(l_c(theta;x,z') - l_c(theta;x,z) + log_ratio)).
// Returns true if the candidate was accepted. Candidates with NaN
// log-likelihood are rejected and counted in nonfinite_candidates.
template <IncompleteDataModel M>
bool mh_step(const M& m, const ParamVector& theta, ChainState<M>& state) {
  detail::ensure_scored(m, theta, state);

  Proposal<typename M::Latent> prop = m.propose(theta, state.current, state.rng);
  const double cand_loglik = m.complete_loglik(theta, prop.candidate);
  ++state.proposed;
  ++state.window_proposed;

  // A -inf candidate is an ordinary out-of-support rejection; NaN (or +inf,
  // equally pathological) is flagged.
  bool accept = false;
  if (std::isnan(cand_loglik) || (cand_loglik > 0 && std::isinf(cand_loglik)) ||
      std::isnan(prop.log_ratio)) {
    ++state.nonfinite_candidates;
  } else {
    const double log_alpha = cand_loglik - state.current_loglik + prop.log_ratio;
    if (log_alpha >= 0.0) {
      accept = true;
    } else {
      accept = std::log(state.rng.uniform()) < log_alpha;
    }
  }

  if (accept) {
    state.current = std::move(prop.candidate);
    state.current_loglik = cand_loglik;
    ++state.accepted;
    ++state.window_accepted;
  }

  if (state.window_proposed >= kStuckWindow) {
    const double rate =
        static_cast<double>(state.window_accepted) / static_cast<double>(state.window_proposed);
    if (rate < kStuckRate) {
      state.stuck_warning = true;
      ++state.stuck_windows;
    }
    state.window_proposed = 0;
    state.window_accepted = 0;
  }
  return accept;
}

// Running sums over the states visited by one block of MH transitions:
//   sum_score       = sum_k S(theta; z_k)
//   sum_info        = sum_k I(theta; z_k)          (symmetry-checked)
//   sum_score_outer = sum_k S(theta; z_k) S^T
struct BlockStats {
  Eigen::Index dim = 0;
  std::int64_t n = 0;
  Vector sum_score;
  Matrix sum_info;
  Matrix sum_score_outer;
  std::uint64_t accepted = 0;

  explicit BlockStats(Eigen::Index p)
      : dim(p),
        sum_score(Vector::Zero(p)),
        sum_info(Matrix::Zero(p, p)),
        sum_score_outer(Matrix::Zero(p, p)) {}

  Vector score_mean() const { return sum_score / static_cast<double>(n); }
  Matrix info_mean() const { return sum_info / static_cast<double>(n); }
  Matrix score_outer_mean() const { return sum_score_outer / static_cast<double>(n); }
  double acceptance_rate() const {
    return n == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(n);
  }
};

// Step 1 of the iteration: apply mh_step N times from the warm-start state
// and accumulate the block sums the update step needs. The final chain state
// carries z^{(i,N)} into the next iteration.
template <IncompleteDataModel M>
BlockStats run_block(const M& m, const ParamVector& theta, ChainState<M>& state,
                     std::int64_t n_steps) {
  if (n_steps < 1) throw SaemError("run_block: N must be >= 1");
  BlockStats stats(m.dim());
  for (std::int64_t k = 0; k < n_steps; ++k) {
    if (mh_step(m, theta, state)) ++stats.accepted;
    const Vector s = eval_score_checked(m, theta, state.current);
    const Matrix info = eval_info_checked(m, theta, state.current);
    if (!all_finite(s) || !all_finite(info)) {
      throw NonFiniteEvaluation("score/info non-finite inside block");
    }
    stats.sum_score += s;
    stats.sum_info += info;
    stats.sum_score_outer += s * s.transpose();
    ++stats.n;
  }
  return stats;
}

}  // namespace saem
