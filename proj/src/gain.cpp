#include "saem/gain.hpp"

#include <cmath>
#include <sstream>

namespace saem {

GainSchedule::GainSchedule(Kind kind, std::int64_t burn_in, double alpha, double scale)
    : kind_(kind), burn_in_(burn_in), alpha_(alpha), scale_(scale) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("gain: alpha must be finite and > 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("gain: scale must be finite and > 0");
  }
  if (burn_in < 0) {
    throw ConfigError("gain: burn-in length K must be >= 0");
  }
}

GainSchedule GainSchedule::constant_then_decay(std::int64_t burn_in, double alpha) {
  return GainSchedule(Kind::kConstantThenDecay, burn_in, alpha);
}

GainSchedule GainSchedule::polynomial(double scale, double alpha) {
  return GainSchedule(Kind::kPolynomial, 0, alpha, scale);
}

double GainSchedule::gamma(std::int64_t i) const {
  if (i < 1) throw SaemError("gain: iteration index must be >= 1");
  switch (kind_) {
    case Kind::kPolynomial: {
      double g = scale_ * std::pow(static_cast<double>(i), -alpha_);
      return g > 1.0 ? 1.0 : g;
    }
    case Kind::kConstantThenDecay:
      if (i <= burn_in_) return 1.0;
      return std::pow(static_cast<double>(i - burn_in_), -alpha_);
  }
  return 0.0;  // unreachable
}

ConditionReport check_conditions(const GainSchedule& schedule) {
  ConditionReport r;
  r.deciding_exponent = schedule.alpha();
  // Clamping (polynomial) resp. (i-K)^-alpha <= 1 (constant_then_decay) keep
  // every term in [0, 1]; the tails are pure p-series in the exponent.
  r.range_ok = true;
  r.sum_diverges = schedule.alpha() <= 1.0;
  r.sum_sq_converges = 2.0 * schedule.alpha() > 1.0;
  return r;
}

std::string ConditionReport::describe() const {
  std::ostringstream os;
  os << "0<=gamma<=1: " << (range_ok ? "pass" : "FAIL")
     << "; sum gamma diverges (alpha<=1): " << (sum_diverges ? "pass" : "FAIL")
     << "; sum gamma^2 converges (alpha>0.5): " << (sum_sq_converges ? "pass" : "FAIL")
     << " [alpha=" << deciding_exponent << "]";
  return os.str();
}

}  // namespace saem
