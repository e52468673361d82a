#pragma once

#include "saem/refmodels/bivariate_normal.hpp"
#include "saem/refmodels/censored_normal.hpp"
#include "saem/trace.hpp"
#include "saem/types.hpp"

#include <string>
#include <vector>

namespace saem::io {

// Fixed 17-significant-digit rendering so identical runs produce
// byte-identical files.
std::string fmt17(double x);

// Data loaders. Every file needs the exact header named below.
//   censored normal : `value,censored`   (censored in {0,1})
//   mixture / complete normal : `value`
//   bivariate normal: `x1,x2`            (fields numeric or NA)
refmodels::CensoredData load_censored_csv(const std::string& path);
std::vector<double> load_values_csv(const std::string& path);
refmodels::BivariateData load_bivariate_csv(const std::string& path);

void write_censored_csv(const std::string& path, const refmodels::CensoredData& data);
void write_values_csv(const std::string& path, const std::vector<double>& values);
void write_bivariate_csv(const std::string& path, const refmodels::BivariateData& data);

// Per-replication trace: iter,gamma,theta_1..theta_p,step_norm,accept_rate,
// gamma_regularized.
void write_trace_csv(const std::string& path, const Trace& trace);

}  // namespace saem::io
