#pragma once

#include "saem/louis.hpp"
#include "saem/trace.hpp"
#include "saem/types.hpp"

#include <cmath>
#include <cstdint>

namespace saem {

// Coordinate-wise mean of theta over the post-burn portion of the trace.
// The Polyak average is the quantity that stabilizes while raw theta keeps
// oscillating at MC-noise scale.
inline ParamVector polyak_average(const Trace& trace, double burn_fraction) {
  if (trace.empty()) throw EmptyWindow("polyak_average: empty trace");
  if (!(burn_fraction >= 0.0 && burn_fraction < 1.0)) {
    throw SaemError("polyak_average: burn_fraction must be in [0, 1)");
  }
  const std::size_t n = trace.size();
  const std::size_t start = static_cast<std::size_t>(burn_fraction * static_cast<double>(n));
  if (start >= n) throw EmptyWindow("polyak_average: burn removes the whole trace");
  Vector sum = Vector::Zero(trace.front().theta.size());
  for (std::size_t i = start; i < n; ++i) sum += trace[i].theta;
  return sum / static_cast<double>(n - start);
}

// Finitely testable content of the limiting ODE: at a stationary point the
// conditional score expectation vanishes, so a fresh-chain MC estimate of it
// should be zero within MC error.
struct StationarityCheck {
  double residual_norm = 0.0;
  double threshold = 0.0;
  bool pass = false;
  Vector score;
  Vector mc_se;
};

template <IncompleteDataModel M>
StationarityCheck stationarity_residual(const M& m, const ParamVector& theta_hat,
                                        std::int64_t n_draws, std::uint64_t seed) {
  if (n_draws < 100) throw SaemError("stationarity_residual: M must be >= 100");
  const std::int64_t burn = n_draws / 10;
  ScoreEstimate est = estimate_score(m, theta_hat, n_draws, burn, seed);
  StationarityCheck check;
  check.score = est.score;
  check.mc_se = est.mc_se;
  check.residual_norm = est.score.norm();
  check.threshold = 3.0 * est.mc_se.norm();
  check.pass = check.residual_norm <= check.threshold;
  return check;
}

}  // namespace saem
