#include "saem/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace saem::io {

const std::vector<ConfigKey>& config_registry() {
  static const std::vector<ConfigKey> keys = {
      {"model", "string", nullptr, nullptr,
       "model name: censored_normal | mixture | bivariate_normal | complete_normal"},
      {"data.path", "string", "", nullptr,
       "CSV data file (header required; see README for per-model columns)"},
      {"data.generate", "bool", "false", nullptr,
       "draw a synthetic dataset from the gen.* truth instead of loading data.path"},
      {"data.n", "int", "100", nullptr, "synthetic sample size"},
      {"data.seed", "uint", "12345", nullptr, "synthetic data seed"},
      {"gen.mu", "double", "1.0", "censored_normal,complete_normal", "generator true mean"},
      {"gen.sigma", "double", "2.0", "censored_normal", "generator true sigma"},
      {"gen.censor_frac", "double", "0.3", "censored_normal",
       "fraction of draws right-censored at the empirical quantile"},
      {"gen.pi", "double", "0.4", "mixture", "generator true mixing weight of component 1"},
      {"gen.mu1", "double", "0.0", "mixture,bivariate_normal", "generator true mu1"},
      {"gen.mu2", "double", "2.0", "mixture,bivariate_normal", "generator true mu2"},
      {"gen.sigma1", "double", "1.0", "bivariate_normal", "generator true sigma1"},
      {"gen.sigma2", "double", "1.0", "bivariate_normal", "generator true sigma2"},
      {"gen.rho", "double", "0.5", "bivariate_normal", "generator true correlation"},
      {"gen.miss_frac", "double", "0.3", "bivariate_normal",
       "fraction of rows with one coordinate missing"},
      {"init.theta", "double-list", "", nullptr,
       "starting theta, comma separated; empty = model moment-based init"},
      {"saem.t", "double", "0.0", nullptr, "Gamma(t) mixing parameter for the step"},
      {"saem.max_iter", "int", "2000", nullptr, "iteration budget"},
      {"saem.step_cap", "double", "1.0", nullptr, "max ||delta theta|| per iteration"},
      {"saem.ridge", "double", "1e-6", nullptr, "base Gamma ridge, escalated x10 on failure"},
      {"saem.seed", "uint", "1", nullptr, "master run seed (env SAEM_SEED overrides)"},
      {"saem.init_discard", "int", "100", nullptr,
       "MH transitions discarded before iteration 1"},
      {"saem.freeze_theta", "bool", "false", nullptr,
       "disable the theta update (averaging diagnostics only)"},
      {"saem.exact_estep", "bool", "false", "mixture,complete_normal",
       "bypass the sampler with exact conditional expectations"},
      {"saem.diverge_norm", "double", "1e6", nullptr, "||theta|| ceiling before aborting"},
      {"block.base", "int", "1", nullptr, "MH block length N_i = base + ramp*i"},
      {"block.ramp", "int", "0", nullptr, "linear ramp of the block length"},
      {"gain.kind", "string", "constant_then_decay", nullptr,
       "gain schedule: constant_then_decay | polynomial"},
      {"gain.K", "int", "200", nullptr, "burn-in length (gamma_i = 1 for i <= K)"},
      {"gain.alpha", "double", "1.0", nullptr, "decay exponent"},
      {"gain.scale", "double", "1.0", nullptr, "polynomial scale c in min(1, c i^-alpha)"},
      {"stop.window", "int", "100", nullptr, "stopping-rule window W"},
      {"stop.epsilon", "double", "1e-5", nullptr,
       "stop when the Polyak average moves less than this (relative) over W"},
      {"se.draws", "int", "10000", nullptr, "fresh-chain draws for final SEs/stationarity"},
      {"se.burn", "int", "1000", nullptr, "burn-in for the final-SE chain"},
      {"validate.points", "int", "10", nullptr, "parameter points for `saem validate`"},
      {"replications", "int", "1", nullptr, "independent replications R"},
      {"output.dir", "string", "", nullptr, "output directory for traces and report.json"},
  };
  return keys;
}

namespace {

const ConfigKey* find_key(const std::string& key) {
  for (const ConfigKey& k : config_registry()) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool model_matches(const char* models, const std::string& model) {
  if (models == nullptr) return true;
  std::stringstream ss(models);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == model) return true;
  }
  return false;
}

}  // namespace

std::string config_reference() {
  std::ostringstream os;
  os << "Configuration keys (key = value, one per line, '#' comments):\n";
  for (const ConfigKey& k : config_registry()) {
    os << "  " << k.key << " (" << k.type << ", "
       << (k.fallback ? (std::string("default ") +
                         (*k.fallback ? k.fallback : "empty"))
                      : "required")
       << ")";
    if (k.models) os << " [" << k.models << " only]";
    os << "\n      " << k.description << "\n";
  }
  return os.str();
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected `key = value`, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (find_key(key) == nullptr) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key `" + key + "`");
    }
    if (cfg.values_.count(key) != 0) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key `" + key +
                        "`");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

bool Config::is_set(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ConfigError("internal: unregistered key `" + key + "`");
  if (k->fallback == nullptr) {
    throw ConfigError(origin_ + ": missing required key `" + key + "`");
  }
  return k->fallback;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

double Config::get_double(const std::string& key) const {
  const std::string v = raw(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key `" + key + "`: cannot parse `" + v + "` as a real number");
  }
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string v = raw(key);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key `" + key + "`: cannot parse `" + v + "` as an integer");
  }
  return out;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  const std::string v = raw(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key `" + key + "`: cannot parse `" + v + "` as an unsigned integer");
  }
  return out;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key `" + key + "`: cannot parse `" + v + "` as a boolean");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string v = raw(key);
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("key `" + key + "`: cannot parse `" + item + "` as a real number");
    }
  }
  return out;
}

void Config::check_model_keys(const std::string& model) const {
  for (const auto& [key, value] : values_) {
    const ConfigKey* k = find_key(key);
    if (k != nullptr && !model_matches(k->models, model)) {
      throw ConfigError("key `" + key + "` does not apply to model `" + model +
                        "` (valid for: " + k->models + ")");
    }
  }
}

}  // namespace saem::io
