#pragma once

#include "saem/types.hpp"

#include <cstdint>
#include <vector>

namespace saem {

// One row per iteration; the CSV written by the CLI mirrors these fields as
// iter,gamma,theta_1..theta_p,step_norm,accept_rate,gamma_regularized.
struct TraceRecord {
  std::int64_t iter = 0;
  double gamma = 0.0;
  Vector theta;
  double step_norm = 0.0;
  double accept_rate = 0.0;
  bool gamma_regularized = false;
};

using Trace = std::vector<TraceRecord>;

}  // namespace saem
