#pragma once

#include "saem/model.hpp"
#include "saem/optimize.hpp"
#include "saem/types.hpp"

#include <cstdint>

namespace saem::refmodels {

// Models whose observed-data likelihood has a closed form (all built-in
// reference models); they double as exact oracles for the SAEM engine.
template <class M>
concept OracleModel = saem::IncompleteDataModel<M> &&
                      requires(const M& m, const ParamVector& theta) {
                        { m.exact_marginal_loglik(theta) } -> std::convertible_to<double>;
                        { m.exact_em_step(theta) } -> std::convertible_to<ParamVector>;
                      };

// Maximum-likelihood estimate by direct maximization of the exact observed
// log-likelihood (safeguarded quasi-Newton with FD gradients).
template <OracleModel M>
optimize::MaxResult direct_mle(const M& m, const ParamVector& theta0,
                               const optimize::MaxOptions& opts = {}) {
  return optimize::maximize([&m](const Vector& th) { return m.exact_marginal_loglik(th); },
                            theta0, opts);
}

struct EmFixedPoint {
  ParamVector theta;
  std::int64_t iterations = 0;
  bool converged = false;
};

// Iterate the closed-form EM map until the step size drops below tol.
template <OracleModel M>
EmFixedPoint em_fixed_point(const M& m, const ParamVector& theta0, double tol = 1e-10,
                            std::int64_t max_iter = 100000) {
  EmFixedPoint out;
  out.theta = theta0;
  for (std::int64_t i = 1; i <= max_iter; ++i) {
    ParamVector next = m.exact_em_step(out.theta);
    const double delta = (next - out.theta).norm();
    out.theta = std::move(next);
    out.iterations = i;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace saem::refmodels
