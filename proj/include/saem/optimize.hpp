#pragma once

#include "saem/types.hpp"

#include <functional>

namespace saem::optimize {

struct MaxOptions {
  int max_iter = 1000;
  double grad_tol = 1e-6;    // ||g||_2 at return
  double fd_step = 1e-6;     // central-difference step scale
  int max_backtracks = 50;
};

struct MaxResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;  // best iterate still returned
};

using Objective = std::function<double(const Vector&)>;

Vector fd_gradient(const Objective& f, const Vector& x, double step_scale);

// Safeguarded BFGS ascent with central finite-difference gradients and Armijo
// backtracking; the inverse-Hessian approximation resets to the identity when
// a line search stalls, and a steepest-ascent retry runs before giving up.
MaxResult maximize(const Objective& f, Vector x0, const MaxOptions& opts = {});

}  // namespace saem::optimize
