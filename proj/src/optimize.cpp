#include "saem/optimize.hpp"

#include <cmath>

namespace saem::optimize {

Vector fd_gradient(const Objective& f, const Vector& x, double step_scale) {
  const Eigen::Index p = x.size();
  Vector g(p);
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = step_scale * (1.0 + std::fabs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return g;
}

namespace {

Matrix fd_hessian_sym(const Objective& f, const Vector& x, double step_scale) {
  const Eigen::Index p = x.size();
  Matrix h(p, p);
  const double f0 = f(x);
  Vector step(p);
  for (Eigen::Index j = 0; j < p; ++j) step[j] = step_scale * (1.0 + std::fabs(x[j]));
  for (Eigen::Index j = 0; j < p; ++j) {
    Vector xj = x;
    xj[j] = x[j] + step[j];
    const double fp = f(xj);
    xj[j] = x[j] - step[j];
    const double fm = f(xj);
    h(j, j) = (fp - 2.0 * f0 + fm) / (step[j] * step[j]);
    for (Eigen::Index k = j + 1; k < p; ++k) {
      Vector xx = x;
      xx[j] = x[j] + step[j];
      xx[k] = x[k] + step[k];
      const double fpp = f(xx);
      xx[k] = x[k] - step[k];
      const double fpm = f(xx);
      xx[j] = x[j] - step[j];
      const double fmm = f(xx);
      xx[k] = x[k] + step[k];
      const double fmp = f(xx);
      h(j, k) = h(k, j) = (fpp - fpm - fmp + fmm) / (4.0 * step[j] * step[k]);
    }
  }
  return h;
}

// Damped FD-Newton refinement; drives the gradient norm well below the exit
// tolerance once BFGS has reached the basin (where the quadratic model is
// accurate but floating-point improvements in f become unrepresentable).
void newton_polish(const Objective& f, const MaxOptions& opts, MaxResult& res, Vector& g) {
  for (int it = 0; it < 25 && res.grad_norm > 0.0; ++it) {
    if (res.grad_norm <= 1e-2 * opts.grad_tol) break;
    const Matrix h = fd_hessian_sym(f, res.x, 1e-4);
    Eigen::LDLT<Matrix> ldlt(-h);
    if (ldlt.info() != Eigen::Success) break;
    Vector step = ldlt.solve(g);
    if (!all_finite(step)) break;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      const Vector x_new = res.x + step;
      const Vector g_new = fd_gradient(f, x_new, opts.fd_step);
      const double gn_new = g_new.norm();
      if (std::isfinite(gn_new) && gn_new < res.grad_norm) {
        res.x = x_new;
        g = g_new;
        res.grad_norm = gn_new;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  res.value = f(res.x);
}

}  // namespace

MaxResult maximize(const Objective& f, Vector x0, const MaxOptions& opts) {
  const Eigen::Index p = x0.size();
  MaxResult res;
  res.x = std::move(x0);
  res.value = f(res.x);
  if (!std::isfinite(res.value)) {
    throw NonFiniteEvaluation("maximize: objective non-finite at the starting point");
  }

  Vector g = fd_gradient(f, res.x, opts.fd_step);
  Matrix h_inv = Matrix::Identity(p, p);

  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    res.grad_norm = g.norm();
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      return res;
    }

    Vector direction = h_inv * g;
    bool using_gradient = false;
    if (direction.dot(g) <= 0.0 || !all_finite(direction)) {
      h_inv = Matrix::Identity(p, p);  // lost positive definiteness
      direction = g;
      using_gradient = true;
    }

    // Armijo backtracking on the ascent direction.
    const double slope = direction.dot(g);
    double step = 1.0;
    Vector x_new;
    double v_new = 0.0;
    bool improved = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + step * direction;
      v_new = f(x_new);
      if (std::isfinite(v_new) && v_new >= res.value + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved && !using_gradient) {
      // Retry along the raw gradient from a fresh identity approximation.
      h_inv = Matrix::Identity(p, p);
      direction = g;
      step = 1.0;
      const double slope2 = g.squaredNorm();
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        x_new = res.x + step * direction;
        v_new = f(x_new);
        if (std::isfinite(v_new) && v_new >= res.value + 1e-4 * step * slope2) {
          improved = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!improved) {
      res.line_search_failed = true;
      break;  // best iterate so far; the polish below may still finish the job
    }

    const Vector g_new = fd_gradient(f, x_new, opts.fd_step);
    const Vector s = x_new - res.x;
    const Vector y = g - g_new;  // gradient-of-(-f) difference for the BFGS update
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Matrix eye = Matrix::Identity(p, p);
      const Matrix v = eye - (s * y.transpose()) / sy;
      h_inv = v * h_inv * v.transpose() + (s * s.transpose()) / sy;
    }
    res.x = x_new;
    res.value = v_new;
    g = g_new;
  }

  res.grad_norm = g.norm();
  if (res.grad_norm > 1e-2 * opts.grad_tol) {
    newton_polish(f, opts, res, g);
  }
  res.converged = res.grad_norm <= opts.grad_tol;
  if (res.converged) res.line_search_failed = false;
  return res;
}

}  // namespace saem::optimize
