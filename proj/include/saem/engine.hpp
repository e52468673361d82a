#pragma once

#include "saem/diagnostics.hpp"
#include "saem/gain.hpp"
#include "saem/louis.hpp"
#include "saem/model.hpp"
#include "saem/sampler.hpp"
#include "saem/trace.hpp"
#include "saem/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace saem {

// Block length N_i = base + ramp * i, evaluated per iteration.
struct BlockSchedule {
  std::int64_t base = 1;
  std::int64_t ramp = 0;

  std::int64_t length(std::int64_t i) const {
    const std::int64_t n = base + ramp * i;
    return n < 1 ? 1 : n;
  }
};

// Stop when the relative change of the running Polyak average of theta over
// a window of W iterations falls below tol.
struct StopRule {
  std::int64_t window = 100;
  double tol = 1e-5;
};

struct SaemConfig {
  double t = 0.0;  // Gamma(t) mixing parameter used for the step preconditioner
  std::int64_t max_iter = 2000;
  BlockSchedule block;
  GainSchedule gain = GainSchedule::constant_then_decay(200, 1.0);
  double step_cap = 1.0;   // max ||delta theta||_2 per iteration, in model units
  double ridge = 1e-6;     // base Gamma regularization, escalated x10 on failure
  StopRule stop;
  std::uint64_t seed = 1;
  std::int64_t init_discard = 100;  // MH transitions discarded before iteration 1
  bool freeze_theta = false;        // updates 1-3 only (averaging diagnostics)
  bool use_exact_estep = false;     // bypass the sampler via exact conditional moments
  double diverge_norm = 1e6;        // ||theta|| ceiling before DivergedParameter
  std::int64_t se_draws = 10000;    // fresh-chain length for final SEs / stationarity
  std::int64_t se_burn = 1000;

  void validate() const {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("saem: t must be in [0, 1]");
    if (max_iter < 0) throw ConfigError("saem: max_iter must be >= 0");
    if (!(step_cap > 0.0)) throw ConfigError("saem: step_cap must be > 0");
    if (!(ridge >= 0.0)) throw ConfigError("saem: ridge must be >= 0");
    if (stop.window < 1) throw ConfigError("saem: stop window must be >= 1");
    if (!(stop.tol > 0.0)) throw ConfigError("saem: stop tolerance must be > 0");
    if (init_discard < 0) throw ConfigError("saem: init_discard must be >= 0");
    if (se_draws < 2) throw ConfigError("saem: se_draws must be >= 2");
  }
};

// All running estimates of one SAEM run.
template <IncompleteDataModel M>
struct SaemState {
  std::int64_t iter = 0;
  ParamVector theta;
  Vector h;        // running estimate of the observed-data score at theta-hat
  Matrix gamma_I;  // running estimate of E[I | x, theta]
  Matrix gamma_S;  // running estimate of E[S S^T | x, theta]
  ChainState<M> chain;
  Trace trace;

  SaemState(ParamVector theta0, ChainState<M> chain0)
      : theta(std::move(theta0)),
        h(Vector::Zero(theta.size())),
        gamma_I(Matrix::Zero(theta.size(), theta.size())),
        gamma_S(Matrix::Zero(theta.size(), theta.size())),
        chain(std::move(chain0)) {}
};

// Gamma(t) = gamma_I - t * gamma_S + h h^T, symmetrized. At t = 0 this is the
// stable complete-information preconditioner; at t = 1 it estimates the Louis
// observed information.
template <IncompleteDataModel M>
Matrix gamma_t(const SaemState<M>& state, double t) {
  Matrix g = state.gamma_I - t * state.gamma_S + state.h * state.h.transpose();
  return 0.5 * (g + g.transpose());
}

namespace detail {

struct RegularizedGamma {
  Matrix matrix;
  bool regularized = false;
  double ridge_used = 0.0;
};

// Early-iteration Gamma estimates are noisy and can be indefinite (especially
// for t near 1). Try the bare matrix, then add ridge*I escalating x10 up to
// 6 times, until the smallest eigenvalue clears 1e-8*trace/p (floored to stay
// positive when the trace is not).
inline RegularizedGamma regularize_gamma(const Matrix& g, double base_ridge) {
  const Eigen::Index p = g.rows();
  const double clearance = 1e-8 * std::max(g.trace(), 0.0) / static_cast<double>(p) + 1e-12;
  double ridge = std::max(base_ridge, 1e-12);

  RegularizedGamma out;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    const double r = (attempt == 0) ? 0.0 : ridge;
    Matrix candidate = g + r * Matrix::Identity(p, p);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(candidate, Eigen::EigenvaluesOnly);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > clearance) {
      out.matrix = std::move(candidate);
      out.regularized = attempt > 0;
      out.ridge_used = r;
      return out;
    }
    if (attempt > 0) ridge *= 10.0;
  }
  throw SingularGamma("Gamma(t) not invertible after ridge escalation (min eig <= " +
                      std::to_string(clearance) + ")");
}

template <IncompleteDataModel M>
void check_in_bounds_and_finite(const M& m, const ParamVector& theta, const char* who) {
  if (!all_finite(theta)) throw NonFiniteEvaluation(std::string(who) + ": theta non-finite");
  if (!m.bounds().strictly_inside(theta)) {
    throw SaemError(std::string(who) + ": theta outside declared open bounds");
  }
}

}  // namespace detail

// One coupled stochastic-approximation update (Step 1 + Step 2):
//   1. h       += gamma * (Hbar - h)
//   2. gamma_I += gamma * (Ibar - gamma_I)
//   3. gamma_S += gamma * (SSbar - gamma_S)
//   4. Gamma = Gamma(t), regularized to be invertible
//   5. theta   += gamma * Gamma^{-1} Hbar, capped and backtracked into bounds
// In exact-E-step mode the block averages are replaced by the model's exact
// conditional moments: Hbar = E[S|x,theta], gamma_I absorbs E[I - SS^T|x,theta]
// and gamma_S stays zero, which reproduces the Louis form at every t.
template <IncompleteDataModel M>
void saem_step(const M& m, SaemState<M>& state, const SaemConfig& config) {
  const std::int64_t i = state.iter + 1;
  const double gamma = config.gain.gamma(i);

  Vector h_bar;
  Matrix i_bar;
  Matrix ss_bar;
  double accept_rate = 1.0;

  if (config.use_exact_estep) {
    if constexpr (ExactEStepModel<M>) {
      ConditionalMoments cm = m.exact_conditional_expectations(state.theta);
      h_bar = std::move(cm.score_mean);
      i_bar = std::move(cm.info_minus_score_sq);
      ss_bar = Matrix::Zero(m.dim(), m.dim());
    } else {
      throw ConfigError("use_exact_estep requested but the model has no exact E-step");
    }
  } else {
    const std::int64_t n_block = config.block.length(i);
    BlockStats stats = run_block(m, state.theta, state.chain, n_block);
    h_bar = stats.score_mean();
    i_bar = stats.info_mean();
    ss_bar = stats.score_outer_mean();
    accept_rate = stats.acceptance_rate();
  }

  state.h += gamma * (h_bar - state.h);
  state.gamma_I += gamma * (i_bar - state.gamma_I);
  state.gamma_S += gamma * (ss_bar - state.gamma_S);

  double step_norm = 0.0;
  bool regularized = false;
  if (!config.freeze_theta) {
    const Matrix g = gamma_t(state, config.t);
    detail::RegularizedGamma reg = detail::regularize_gamma(g, config.ridge);
    regularized = reg.regularized;

    Vector step = gamma * reg.matrix.llt().solve(h_bar);
    if (!all_finite(step)) throw SingularGamma("Gamma solve produced a non-finite step");
    const double norm = step.norm();
    if (norm > config.step_cap) step *= config.step_cap / norm;

    const ParamBounds bounds = m.bounds();
    ParamVector proposal = state.theta + step;
    int halvings = 0;
    while (!bounds.strictly_inside(proposal)) {
      if (++halvings > 30) {
        throw SaemError("saem_step: could not backtrack the step into open bounds");
      }
      step *= 0.5;
      proposal = state.theta + step;
    }
    state.theta = proposal;
    step_norm = step.norm();

    if (state.theta.norm() > config.diverge_norm) {
      throw DivergedParameter("theta norm " + std::to_string(state.theta.norm()) +
                              " exceeded ceiling " + std::to_string(config.diverge_norm));
    }
  }

  TraceRecord rec;
  rec.iter = i;
  rec.gamma = gamma;
  rec.theta = state.theta;
  rec.step_norm = step_norm;
  rec.accept_rate = accept_rate;
  rec.gamma_regularized = regularized;
  state.trace.push_back(std::move(rec));
  state.iter = i;
}

enum class StopReason { kNotStarted, kMaxIter, kConverged };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kNotStarted: return "not_started";
    case StopReason::kMaxIter: return "max_iter";
    case StopReason::kConverged: return "converged";
  }
  return "unknown";
}

struct RunReport {
  ParamVector theta0;
  ParamVector theta_hat;
  Vector h_final;
  Matrix gamma_t_final;  // Gamma(config.t) at the endpoint
  Matrix gamma_1_final;  // Gamma(1) at the endpoint
  InformationEstimate info;  // fresh-chain Louis information at theta_hat
  Vector se;
  bool se_valid = false;
  StationarityCheck stationarity;
  bool has_diagnostics = false;
  ParamVector polyak;
  Trace trace;
  StopReason stop_reason = StopReason::kNotStarted;
  std::int64_t iterations = 0;
  std::uint64_t stuck_windows = 0;
  std::uint64_t nonfinite_candidates = 0;
  std::int64_t regularized_iterations = 0;
  double mean_accept_rate = 0.0;
};

// Full run: init chain, loop saem_step until max_iter or the stopping rule
// fires, then recompute standard errors and the stationarity residual with
// fresh dedicated chains at theta_hat (the running Gamma(1) mixes draws from
// stale theta values and is reported but not used for SEs).
template <IncompleteDataModel M>
RunReport run(const M& m, const ParamVector& theta0, const SaemConfig& config) {
  config.validate();
  detail::check_in_bounds_and_finite(m, theta0, "run");

  SaemState<M> state(theta0, init_chain(m, theta0, derive_seed(config.seed, 101)));
  for (std::int64_t k = 0; k < config.init_discard; ++k) mh_step(m, theta0, state.chain);

  RunReport report;
  report.theta0 = theta0;

  // Running Polyak average over the decay phase (post gain burn-in), with a
  // history so the sliding-window change can look back W iterations.
  const std::int64_t avg_start = config.gain.burn_in();
  Vector polyak_sum = Vector::Zero(theta0.size());
  std::vector<Vector> polyak_history;
  std::int64_t polyak_count = 0;

  StopReason reason = (config.max_iter == 0) ? StopReason::kNotStarted : StopReason::kMaxIter;
  for (std::int64_t i = 1; i <= config.max_iter; ++i) {
    saem_step(m, state, config);

    if (i > avg_start && !config.freeze_theta) {
      polyak_sum += state.theta;
      ++polyak_count;
      polyak_history.push_back(polyak_sum / static_cast<double>(polyak_count));
      const std::int64_t w = config.stop.window;
      if (polyak_count >= 2 * w) {
        const Vector& now = polyak_history.back();
        const Vector& then = polyak_history[static_cast<std::size_t>(polyak_count - 1 - w)];
        const double rel = (now - then).norm() / (1e-8 + then.norm());
        if (rel < config.stop.tol) {
          reason = StopReason::kConverged;
          break;
        }
      }
    }
  }

  report.stop_reason = reason;
  report.iterations = state.iter;
  report.theta_hat = state.theta;
  report.h_final = state.h;
  report.trace = std::move(state.trace);
  report.stuck_windows = state.chain.stuck_windows;
  report.nonfinite_candidates = state.chain.nonfinite_candidates;

  if (state.iter == 0) return report;  // NotStarted: theta0 passed through

  report.gamma_t_final = gamma_t(state, config.t);
  report.gamma_1_final = gamma_t(state, 1.0);

  double accept_sum = 0.0;
  for (const TraceRecord& r : report.trace) {
    accept_sum += r.accept_rate;
    if (r.gamma_regularized) ++report.regularized_iterations;
  }
  report.mean_accept_rate = accept_sum / static_cast<double>(report.trace.size());
  report.polyak = polyak_average(report.trace, 0.5);

  report.info = louis_information(m, report.theta_hat, config.se_draws, config.se_burn,
                                  derive_seed(config.seed, 202));
  if (report.info.condition_flag) {
    report.se = standard_errors(report.info);
    report.se_valid = true;
  }
  report.stationarity = stationarity_residual(m, report.theta_hat,
                                              std::max<std::int64_t>(config.se_draws, 100),
                                              derive_seed(config.seed, 303));
  report.has_diagnostics = true;
  return report;
}

}  // namespace saem
