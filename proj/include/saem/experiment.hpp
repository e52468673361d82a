#pragma once

#include <string>

namespace saem {

// Batch experiment entry points behind the CLI. All return process exit
// codes: 0 success, 1 configuration error, 2 run/check failure.
int run_experiment(const std::string& config_path, int jobs);
int run_validate(const std::string& config_path);
int run_oracle(const std::string& config_path);

}  // namespace saem
