#include "saem/experiment.hpp"

#include "saem/engine.hpp"
#include "saem/io/config.hpp"
#include "saem/io/csv.hpp"
#include "saem/refmodels/bivariate_normal.hpp"
#include "saem/refmodels/censored_normal.hpp"
#include "saem/refmodels/complete_normal.hpp"
#include "saem/refmodels/mixture.hpp"
#include "saem/refmodels/oracle.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <variant>
#include <vector>

namespace saem {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using io::Config;

using AnyModel = std::variant<refmodels::CensoredNormalModel, refmodels::MixtureModel,
                              refmodels::BivariateNormalMissingModel,
                              refmodels::CompleteDataNormalModel>;

AnyModel build_model(const Config& cfg) {
  const std::string name = cfg.get_string("model");
  cfg.check_model_keys(name);

  const bool generate = cfg.get_bool("data.generate");
  const std::string path = cfg.get_string("data.path");
  if (generate == !path.empty()) {
    throw ConfigError("set exactly one of data.generate=true or data.path");
  }
  const auto n = static_cast<std::size_t>(cfg.get_int("data.n"));
  const std::uint64_t dseed = cfg.get_uint("data.seed");

  if (name == "censored_normal") {
    auto data = generate
                    ? refmodels::CensoredNormalModel::generate(
                          cfg.get_double("gen.mu"), cfg.get_double("gen.sigma"), n,
                          cfg.get_double("gen.censor_frac"), dseed)
                    : io::load_censored_csv(path);
    return refmodels::CensoredNormalModel(std::move(data));
  }
  if (name == "mixture") {
    auto data = generate ? refmodels::MixtureModel::generate(
                               cfg.get_double("gen.pi"), cfg.get_double("gen.mu1"),
                               cfg.get_double("gen.mu2"), n, dseed)
                         : io::load_values_csv(path);
    return refmodels::MixtureModel(std::move(data));
  }
  if (name == "bivariate_normal") {
    auto data = generate
                    ? refmodels::BivariateNormalMissingModel::generate(
                          cfg.get_double("gen.mu1"), cfg.get_double("gen.mu2"),
                          cfg.get_double("gen.sigma1"), cfg.get_double("gen.sigma2"),
                          cfg.get_double("gen.rho"), n, cfg.get_double("gen.miss_frac"), dseed)
                    : io::load_bivariate_csv(path);
    return refmodels::BivariateNormalMissingModel(std::move(data));
  }
  if (name == "complete_normal") {
    std::vector<double> data;
    if (generate) {
      Rng rng(dseed);
      const double mu = cfg.get_double("gen.mu");
      data.resize(n);
      for (double& v : data) v = mu + rng.normal();
    } else {
      data = io::load_values_csv(path);
    }
    return refmodels::CompleteDataNormalModel(std::move(data));
  }
  throw ConfigError("unknown model `" + name + "` (see --help for the valid names)");
}

GainSchedule build_gain(const Config& cfg) {
  const std::string kind = cfg.get_string("gain.kind");
  if (kind == "constant_then_decay") {
    return GainSchedule::constant_then_decay(cfg.get_int("gain.K"),
                                             cfg.get_double("gain.alpha"));
  }
  if (kind == "polynomial") {
    return GainSchedule::polynomial(cfg.get_double("gain.scale"), cfg.get_double("gain.alpha"));
  }
  throw ConfigError("gain.kind must be constant_then_decay or polynomial, got `" + kind + "`");
}

SaemConfig build_saem_config(const Config& cfg) {
  SaemConfig sc;
  sc.t = cfg.get_double("saem.t");
  sc.max_iter = cfg.get_int("saem.max_iter");
  sc.block.base = cfg.get_int("block.base");
  sc.block.ramp = cfg.get_int("block.ramp");
  sc.gain = build_gain(cfg);
  sc.step_cap = cfg.get_double("saem.step_cap");
  sc.ridge = cfg.get_double("saem.ridge");
  sc.stop.window = cfg.get_int("stop.window");
  sc.stop.tol = cfg.get_double("stop.epsilon");
  sc.seed = cfg.get_uint("saem.seed");
  if (const char* env = std::getenv("SAEM_SEED")) {
    try {
      sc.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("SAEM_SEED is set but does not parse as an unsigned integer");
    }
  }
  sc.init_discard = cfg.get_int("saem.init_discard");
  sc.freeze_theta = cfg.get_bool("saem.freeze_theta");
  sc.use_exact_estep = cfg.get_bool("saem.exact_estep");
  sc.diverge_norm = cfg.get_double("saem.diverge_norm");
  sc.se_draws = cfg.get_int("se.draws");
  sc.se_burn = cfg.get_int("se.burn");
  sc.validate();
  return sc;
}

template <class M>
ParamVector initial_theta(const M& m, const Config& cfg) {
  const std::vector<double> given = cfg.get_double_list("init.theta");
  if (given.empty()) return m.default_init();
  if (static_cast<Eigen::Index>(given.size()) != m.dim()) {
    throw ConfigError("init.theta has " + std::to_string(given.size()) +
                      " entries, model dimension is " + std::to_string(m.dim()));
  }
  ParamVector theta(m.dim());
  for (Eigen::Index j = 0; j < m.dim(); ++j) theta[j] = given[static_cast<std::size_t>(j)];
  return theta;
}

json vec_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
  return a;
}

template <class M>
json oracle_json(const M& m, const ParamVector& theta0) {
  json out;
  auto mle = refmodels::direct_mle(m, theta0);
  out["method"] = "direct_mle";
  out["theta"] = vec_to_json(mle.x);
  out["loglik"] = mle.value;
  out["grad_norm"] = mle.grad_norm;
  out["converged"] = mle.converged;
  auto em = refmodels::em_fixed_point(m, theta0);
  out["em_fixed_point"] = vec_to_json(em.theta);
  out["em_iterations"] = em.iterations;
  out["em_converged"] = em.converged;
  return out;
}

json report_run_json(const RunReport& rep, std::uint64_t seed, int replication,
                     const Vector* oracle_theta) {
  json r;
  r["replication"] = replication;
  r["seed"] = seed;
  r["theta_hat"] = vec_to_json(rep.theta_hat);
  r["h"] = vec_to_json(rep.h_final);
  r["stop_reason"] = to_string(rep.stop_reason);
  r["iterations"] = rep.iterations;
  r["se_valid"] = rep.se_valid;
  r["se"] = rep.se_valid ? vec_to_json(rep.se) : json();
  if (rep.iterations > 0) {
    r["polyak"] = vec_to_json(rep.polyak);
    r["mean_accept_rate"] = rep.mean_accept_rate;
    r["regularized_iterations"] = rep.regularized_iterations;
    r["stuck_windows"] = rep.stuck_windows;
    r["nonfinite_candidates"] = rep.nonfinite_candidates;
  }
  if (rep.has_diagnostics) {
    r["stationarity"] = {{"residual", rep.stationarity.residual_norm},
                         {"threshold", rep.stationarity.threshold},
                         {"pass", rep.stationarity.pass}};
  }
  if (oracle_theta != nullptr && rep.iterations > 0) {
    Vector dev(rep.theta_hat.size());
    for (Eigen::Index j = 0; j < dev.size(); ++j) {
      const double denom = std::max(1e-12, std::abs((*oracle_theta)[j]));
      dev[j] = std::abs(rep.theta_hat[j] - (*oracle_theta)[j]) / denom;
    }
    r["oracle_rel_deviation"] = vec_to_json(dev);
  }
  return r;
}

int dispatch_failure(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
      dynamic_cast<const DataFormatError*>(&e) != nullptr) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "run error: " << e.what() << "\n";
  return 2;
}

}  // namespace

int run_experiment(const std::string& config_path, int jobs) {
  try {
    const Config cfg = Config::parse_file(config_path);
    const AnyModel model = build_model(cfg);
    const SaemConfig base = build_saem_config(cfg);
    const std::int64_t replications = cfg.get_int("replications");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    const std::string out_dir = cfg.get_string("output.dir");
    if (out_dir.empty()) throw ConfigError("output.dir is required for `saem run`");
    fs::create_directories(out_dir);
    if (jobs < 1) throw ConfigError("--jobs must be >= 1");

    return std::visit(
        [&](const auto& m) -> int {
          const ParamVector theta0 = initial_theta(m, cfg);

          std::vector<RunReport> reports(static_cast<std::size_t>(replications));
          std::vector<std::exception_ptr> failures(static_cast<std::size_t>(replications));
          std::atomic<std::int64_t> next{0};

          auto worker = [&]() {
            for (;;) {
              const std::int64_t r = next.fetch_add(1);
              if (r >= replications) return;
              try {
                SaemConfig run_cfg = base;
                run_cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                RunReport rep = run(m, theta0, run_cfg);
                io::write_trace_csv(out_dir + "/trace_" + std::to_string(r) + ".csv",
                                    rep.trace);
                reports[static_cast<std::size_t>(r)] = std::move(rep);
              } catch (...) {
                failures[static_cast<std::size_t>(r)] = std::current_exception();
              }
            }
          };

          const int n_threads = static_cast<int>(
              std::min<std::int64_t>(jobs, replications));
          std::vector<std::thread> pool;
          for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
          worker();
          for (std::thread& t : pool) t.join();

          for (const std::exception_ptr& failure : failures) {
            if (failure) std::rethrow_exception(failure);
          }

          json report;
          report["model"] = cfg.get_string("model");
          report["n_obs"] = m.num_obs();
          report["config"] = cfg.values();
          report["seed"] = base.seed;
          report["replications"] = replications;
          json oracle = oracle_json(m, theta0);
          report["oracle"] = oracle;
          Vector oracle_theta(m.dim());
          for (Eigen::Index j = 0; j < m.dim(); ++j) {
            oracle_theta[j] = oracle["theta"][static_cast<std::size_t>(j)].get<double>();
          }
          json runs = json::array();
          for (std::int64_t r = 0; r < replications; ++r) {
            runs.push_back(report_run_json(reports[static_cast<std::size_t>(r)],
                                           base.seed + static_cast<std::uint64_t>(r),
                                           static_cast<int>(r), &oracle_theta));
          }
          report["runs"] = runs;

          std::ofstream out(out_dir + "/report.json", std::ios::trunc);
          if (!out) throw DataFormatError("cannot write " + out_dir + "/report.json");
          out << report.dump(2) << "\n";
          std::cout << "wrote " << out_dir << "/report.json (" << replications
                    << " replication" << (replications == 1 ? "" : "s") << ")\n";
          return 0;
        },
        model);
  } catch (const std::exception& e) {
    return dispatch_failure(e);
  }
}

int run_validate(const std::string& config_path) {
  try {
    const Config cfg = Config::parse_file(config_path);
    const AnyModel model = build_model(cfg);
    return std::visit(
        [&](const auto& m) -> int {
          const ParamVector theta0 = initial_theta(m, cfg);
          const auto report = validate_model(m, theta0, static_cast<int>(cfg.get_int(
                                                            "validate.points")),
                                             cfg.get_uint("saem.seed"));
          std::cout << report.describe() << "\n";
          return report.all_pass() ? 0 : 2;
        },
        model);
  } catch (const std::exception& e) {
    return dispatch_failure(e);
  }
}

int run_oracle(const std::string& config_path) {
  try {
    const Config cfg = Config::parse_file(config_path);
    const AnyModel model = build_model(cfg);
    return std::visit(
        [&](const auto& m) -> int {
          const ParamVector theta0 = initial_theta(m, cfg);
          json out;
          out["model"] = cfg.get_string("model");
          out["n_obs"] = m.num_obs();
          out["oracle"] = oracle_json(m, theta0);
          const std::string dump = out.dump(2);
          std::cout << dump << "\n";
          const std::string out_dir = cfg.get_string("output.dir");
          if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            std::ofstream f(out_dir + "/oracle.json", std::ios::trunc);
            if (!f) throw DataFormatError("cannot write " + out_dir + "/oracle.json");
            f << dump << "\n";
          }
          return 0;
        },
        model);
  } catch (const std::exception& e) {
    return dispatch_failure(e);
  }
}

}  // namespace saem
