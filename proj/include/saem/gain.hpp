#pragma once

#include "saem/types.hpp"

#include <cstdint>
#include <string>

namespace saem {

// Robbins-Monro gain sequence. Two shapes:
//   polynomial:          gamma_i = min(1, c * i^-alpha)
//   constant_then_decay: gamma_i = 1 for i <= K, else (i - K)^-alpha
// Valid Robbins-Monro behaviour (0 <= gamma <= 1, sum gamma = inf,
// sum gamma^2 < inf) requires alpha in (0.5, 1]; check_conditions() reports
// which of the three conditions a given schedule satisfies.
class GainSchedule {
 public:
  enum class Kind { kConstantThenDecay, kPolynomial };

  // Structural validation only (c > 0, alpha > 0, K >= 0); Robbins-Monro
  // validity is the job of check_conditions so that failing exponents are
  // still constructible and reportable.
  GainSchedule(Kind kind, std::int64_t burn_in, double alpha, double scale = 1.0);

  static GainSchedule constant_then_decay(std::int64_t burn_in, double alpha);
  static GainSchedule polynomial(double scale, double alpha);

  // gamma_i for iteration i >= 1; pure.
  double gamma(std::int64_t i) const;

  Kind kind() const { return kind_; }
  std::int64_t burn_in() const { return burn_in_; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }

 private:
  Kind kind_;
  std::int64_t burn_in_;
  double alpha_;
  double scale_;
};

struct ConditionReport {
  bool range_ok;          // 0 <= gamma_i <= 1 for all i
  bool sum_diverges;      // sum gamma_i = inf  (needs alpha <= 1)
  bool sum_sq_converges;  // sum gamma_i^2 < inf (needs alpha > 0.5)
  double deciding_exponent;

  bool all_pass() const { return range_ok && sum_diverges && sum_sq_converges; }
  std::string describe() const;
};

// Symbolic check via the decay exponent; no finite truncation of the sums.
ConditionReport check_conditions(const GainSchedule& schedule);

}  // namespace saem
