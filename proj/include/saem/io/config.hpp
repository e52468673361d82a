#pragma once

#include "saem/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace saem::io {

// One documented experiment key. The registry is the single source of truth:
// --help prints it and the parser rejects anything not in it.
struct ConfigKey {
  const char* key;
  const char* type;    // string | int | uint | double | bool | double-list
  const char* fallback;  // default rendered as text; nullptr = required
  const char* models;  // comma list of models the key applies to; nullptr = all
  const char* description;
};

const std::vector<ConfigKey>& config_registry();

// Rendered key table for --help.
std::string config_reference();

// Plain-text `key = value` experiment configuration with dotted key names,
// '#' comments and hard errors on unknown or duplicated keys.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool is_set(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  // Keys set in the file but not applicable to the configured model.
  void check_model_keys(const std::string& model) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string raw(const std::string& key) const;  // value or registry default

  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace saem::io
