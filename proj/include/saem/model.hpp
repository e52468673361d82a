#pragma once

#include "saem/types.hpp"

#include <cmath>
#include <concepts>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace saem {

// MH proposal: candidate latent plus log q(z|z') - log q(z'|z).
template <class L>
struct Proposal {
  L candidate;
  double log_ratio;
};

// Exact conditional moments for oracle-capable models:
//   score_mean            = E[S_theta | x, theta]
//   info_minus_score_sq   = E[I_thetatheta - S_theta S_theta^T | x, theta]
struct ConditionalMoments {
  Vector score_mean;
  Matrix info_minus_score_sq;
};

// Contract every incomplete-data model must satisfy. The model owns its
// observed data and its latent representation; the engine sees both only
// through these functions. All of them must be safe for concurrent
// read-only invocation.
template <class M>
concept IncompleteDataModel =
    std::copy_constructible<typename M::Latent> &&
    requires(const M& m, const ParamVector& theta, const typename M::Latent& z, Rng& rng) {
      { m.dim() } -> std::convertible_to<Eigen::Index>;
      { m.num_obs() } -> std::convertible_to<std::size_t>;
      { m.bounds() } -> std::convertible_to<ParamBounds>;
      { m.complete_loglik(theta, z) } -> std::convertible_to<double>;
      { m.score(theta, z) } -> std::convertible_to<Vector>;
      { m.complete_info(theta, z) } -> std::convertible_to<Matrix>;
      { m.propose(theta, z, rng) } -> std::convertible_to<Proposal<typename M::Latent>>;
      { m.init_latent(theta, rng) } -> std::convertible_to<typename M::Latent>;
    };

// Models that can compute the E-step exactly (used to bypass the sampler
// and by oracle tests).
template <class M>
concept ExactEStepModel =
    IncompleteDataModel<M> && requires(const M& m, const ParamVector& theta) {
      { m.exact_conditional_expectations(theta) } -> std::convertible_to<ConditionalMoments>;
    };

// ---------------------------------------------------------------------------
// Checked evaluation helpers
// ---------------------------------------------------------------------------

inline constexpr double kInfoAsymmetryTol = 1e-10;

template <IncompleteDataModel M>
Vector eval_score_checked(const M& m, const ParamVector& theta, const typename M::Latent& z) {
  Vector s = m.score(theta, z);
  if (s.size() != m.dim()) {
    throw DimensionMismatch("score returned dimension " + std::to_string(s.size()) +
                            ", expected " + std::to_string(m.dim()));
  }
  return s;
}

// Evaluates the complete-data information, enforces the symmetry contract
// (max |A - A^T| <= 1e-10), and returns the symmetrized matrix.
template <IncompleteDataModel M>
Matrix eval_info_checked(const M& m, const ParamVector& theta, const typename M::Latent& z) {
  Matrix a = m.complete_info(theta, z);
  if (a.rows() != m.dim() || a.cols() != m.dim()) {
    throw DimensionMismatch("complete_info returned " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square of dim " +
                            std::to_string(m.dim()));
  }
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kInfoAsymmetryTol) && a.allFinite()) {
    throw ModelContractError("complete_info asymmetry " + std::to_string(asym) +
                             " exceeds 1e-10");
  }
  return 0.5 * (a + a.transpose());
}

// ---------------------------------------------------------------------------
// validate_model
// ---------------------------------------------------------------------------

struct CheckResult {
  bool pass = true;
  double worst_rel_err = 0.0;
  int worst_point = -1;
  Eigen::Index worst_index = -1;
};

struct ValidationReport {
  CheckResult score_check;     // analytic score vs central FD of complete_loglik
  CheckResult info_check;      // analytic -info vs central FD of score
  double worst_asymmetry = 0.0;
  bool symmetry_pass = true;
  int points_checked = 0;

  bool all_pass() const { return score_check.pass && info_check.pass && symmetry_pass; }
  std::string describe() const {
    std::ostringstream os;
    os << "score vs FD: " << (score_check.pass ? "pass" : "FAIL")
       << " (worst rel err " << score_check.worst_rel_err << "); "
       << "info vs FD: " << (info_check.pass ? "pass" : "FAIL")
       << " (worst rel err " << info_check.worst_rel_err << "); "
       << "info symmetry: " << (symmetry_pass ? "pass" : "FAIL")
       << " (worst " << worst_asymmetry << "); points=" << points_checked;
    return os.str();
  }
};

inline constexpr double kScoreFdTol = 1e-4;
inline constexpr double kInfoFdTol = 1e-3;

namespace detail {

// Scaled relative error |a - ref| / (1 + |ref|); FD value is the reference.
inline double scaled_rel_err(double a, double ref) {
  return std::fabs(a - ref) / (1.0 + std::fabs(ref));
}

}  // namespace detail

// Consistency check of the user-supplied derivatives against central finite
// differences of complete_loglik, at n_points perturbed parameter points,
// each with a freshly drawn latent state. Deterministic given rng_seed.
template <IncompleteDataModel M>
ValidationReport validate_model(const M& m, const ParamVector& theta0, int n_points,
                                std::uint64_t rng_seed) {
  if (n_points < 1) throw SaemError("validate_model: n_points must be >= 1");
  const Eigen::Index p = m.dim();
  if (theta0.size() != p) {
    throw DimensionMismatch("validate_model: theta0 has dimension " +
                            std::to_string(theta0.size()) + ", expected " + std::to_string(p));
  }
  const ParamBounds bounds = m.bounds();
  if (!bounds.strictly_inside(theta0)) {
    throw SaemError("validate_model: theta0 outside declared bounds");
  }

  Rng rng(rng_seed);
  ValidationReport report;
  report.points_checked = n_points;

  for (int pt = 0; pt < n_points; ++pt) {
    // Perturb theta0, backing off toward theta0 until strictly in bounds.
    ParamVector theta = theta0;
    for (Eigen::Index j = 0; j < p; ++j) {
      theta[j] += (2.0 * rng.uniform() - 1.0) * 0.25 * (1.0 + std::fabs(theta0[j]));
    }
    for (int halve = 0; halve < 60 && !bounds.strictly_inside(theta); ++halve) {
      theta = theta0 + 0.5 * (theta - theta0);
    }

    const auto z = m.init_latent(theta, rng);

    const double l0 = m.complete_loglik(theta, z);
    if (!std::isfinite(l0)) {
      throw NonFiniteEvaluation("complete_loglik non-finite at validation point " +
                                std::to_string(pt));
    }
    const Vector s = eval_score_checked(m, theta, z);
    const Matrix info = m.complete_info(theta, z);
    if (info.rows() != p || info.cols() != p) {
      throw DimensionMismatch("complete_info shape mismatch at validation point");
    }
    if (!all_finite(s) || !all_finite(info)) {
      throw NonFiniteEvaluation("score/info non-finite at validation point " +
                                std::to_string(pt));
    }
    const double asym = (info - info.transpose()).cwiseAbs().maxCoeff();
    report.worst_asymmetry = std::max(report.worst_asymmetry, asym);
    if (asym > kInfoAsymmetryTol) report.symmetry_pass = false;

    for (Eigen::Index j = 0; j < p; ++j) {
      const double h = 1e-5 * (1.0 + std::fabs(theta[j]));
      ParamVector tp = theta, tm = theta;
      tp[j] += h;
      tm[j] -= h;

      const double lp = m.complete_loglik(tp, z);
      const double lm = m.complete_loglik(tm, z);
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw NonFiniteEvaluation("complete_loglik non-finite under FD perturbation");
      }
      const double fd_score = (lp - lm) / (2.0 * h);
      const double es = detail::scaled_rel_err(s[j], fd_score);
      if (es > report.score_check.worst_rel_err) {
        report.score_check.worst_rel_err = es;
        report.score_check.worst_point = pt;
        report.score_check.worst_index = j;
      }

      // FD of the score column gives -info column j.
      const Vector sp = m.score(tp, z);
      const Vector sm = m.score(tm, z);
      if (!all_finite(sp) || !all_finite(sm)) {
        throw NonFiniteEvaluation("score non-finite under FD perturbation");
      }
      for (Eigen::Index k = 0; k < p; ++k) {
        const double fd_hess = (sp[k] - sm[k]) / (2.0 * h);
        const double ei = detail::scaled_rel_err(-info(k, j), fd_hess);
        if (ei > report.info_check.worst_rel_err) {
          report.info_check.worst_rel_err = ei;
          report.info_check.worst_point = pt;
          report.info_check.worst_index = j;
        }
      }
    }
  }

  report.score_check.pass = report.score_check.worst_rel_err <= kScoreFdTol;
  report.info_check.pass = report.info_check.worst_rel_err <= kInfoFdTol;
  return report;
}

}  // namespace saem
