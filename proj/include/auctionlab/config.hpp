#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "auctionlab/common.hpp"
#include "auctionlab/environment.hpp"
#include "auctionlab/prediction_io.hpp"
#include "auctionlab/runner.hpp"
#include "auctionlab/scpp.hpp"
#include "auctionlab/strategy_spec.hpp"
#include "auctionlab/textio.hpp"

namespace auctionlab {

/// FNV-1a over the canonical config dump; embedded in every output file.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

/// Experiment description loaded from a JSON config file. Seeds are always
/// explicit; there are no wall-clock defaults anywhere.
struct ExperimentConfig {
  Environment environment = Environment::make(ValuationFamily::Scheduling, 3, 3);
  std::vector<std::string> strategies;
  std::map<std::string, std::string> prediction_files;  // registry key -> path

  // scpp
  int scpp_games = 10000;
  int scpp_iterations = 50;
  double scpp_tau = 0.05;
  double scpp_kappa = 0.0;  // 0 = running average 1/t
  Statistic scpp_statistic = Statistic::HighestOtherBid;
  bool scpp_all_viewpoints = false;

  // egta
  int egta_instances = 10000;
  int egta_resamples = 200;
  double egta_quantile = 0.9;

  // oracle
  int oracle_trials = 200;
  double oracle_grid_step = 1.0;

  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
  int workers = 0;

  std::string config_hash;  // of the canonical JSON

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (!j.contains("environment")) throw ConfigError("config missing 'environment'");
    const auto& env = j.at("environment");
    cfg.environment = Environment::parse(env.at("label").get<std::string>(),
                                         env.value("price_grid_max", -1));
    if (!j.contains("seed")) throw ConfigError("config missing explicit 'seed'");
    cfg.master_seed = j.at("seed").get<std::uint64_t>();

    for (const auto& s : j.value("strategies", nlohmann::json::array())) {
      cfg.strategies.push_back(s.get<std::string>());
      parse_strategy(cfg.strategies.back());  // fail fast on bad specs
    }
    if (j.contains("predictions")) {
      for (const auto& [key, value] : j.at("predictions").items()) {
        cfg.prediction_files[key] = value.get<std::string>();
      }
    }
    if (j.contains("scpp")) {
      const auto& s = j.at("scpp");
      cfg.scpp_games = s.value("games_per_iteration", cfg.scpp_games);
      cfg.scpp_iterations = s.value("max_iterations", cfg.scpp_iterations);
      cfg.scpp_tau = s.value("tau", cfg.scpp_tau);
      cfg.scpp_kappa = s.value("kappa", cfg.scpp_kappa);
      cfg.scpp_all_viewpoints = s.value("all_viewpoints", cfg.scpp_all_viewpoints);
      if (s.contains("statistic")) {
        cfg.scpp_statistic = parse_statistic(s.at("statistic").get<std::string>());
      }
    }
    if (j.contains("egta")) {
      const auto& e = j.at("egta");
      cfg.egta_instances = e.value("instances_per_profile", cfg.egta_instances);
      cfg.egta_resamples = e.value("bootstrap_resamples", cfg.egta_resamples);
      cfg.egta_quantile = e.value("bootstrap_quantile", cfg.egta_quantile);
    }
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      cfg.oracle_trials = o.value("trials", cfg.oracle_trials);
      cfg.oracle_grid_step = o.value("grid_step", cfg.oracle_grid_step);
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.config_hash = fnv1a_hex(j.dump());
    return cfg;
  }

  static ExperimentConfig load(const std::string& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    try {
      return from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

  /// Loads every registered prediction file into a store.
  PredictionStore load_predictions() const {
    PredictionStore store;
    for (const auto& [key, path] : prediction_files) {
      store.put(key, PredictionFile::load(path).prediction);
    }
    return store;
  }

  ScppConfig scpp_config(const StrategySpec& strategy) const {
    ScppConfig sc;
    sc.strategy = strategy;
    sc.environment = environment;
    sc.statistic = scpp_statistic;
    sc.games_per_iteration = scpp_games;
    sc.max_iterations = scpp_iterations;
    sc.kappa = scpp_kappa > 0.0 ? KappaSchedule::fixed(scpp_kappa) : KappaSchedule::running_average();
    sc.tau = scpp_tau;
    sc.seed = master_seed;
    sc.all_viewpoints = scpp_all_viewpoints;
    sc.workers = workers;
    return sc;
  }
};

}  // namespace auctionlab
