#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "auctionlab/environment.hpp"
#include "auctionlab/prediction.hpp"
#include "auctionlab/strategies.hpp"
#include "auctionlab/strategy_spec.hpp"

namespace auctionlab {

/// Named predictions available to strategies (typically loaded from files
/// produced by scpp derivation).
class PredictionStore {
 public:
  void put(const std::string& key, PricePrediction prediction) {
    store_.insert_or_assign(key, std::move(prediction));
  }

  bool has(const std::string& key) const { return store_.count(key) != 0; }

  const PricePrediction& get(const std::string& key) const {
    const auto it = store_.find(key);
    if (it == store_.end()) {
      throw ConfigError("no prediction registered under key '" + key + "'");
    }
    return it->second;
  }

 private:
  std::map<std::string, PricePrediction> store_;
};

/// Computes a bid for the spec's family against a fixed prediction. Nested
/// generators (BidEval candidates, LocalBid initialization) consume the same
/// prediction.
inline BidVector compute_bid(const StrategySpec& spec, const Valuation& v,
                             const PricePrediction& pi, Rng& rng) {
  switch (spec.family) {
    case StrategyFamily::StraightMV:
      return straight_mv(v, pi.expected_point());
    case StrategyFamily::StraightMU:
      return straight_mu(v, pi, spec.mu_samples, rng);
    case StrategyFamily::AverageMU:
      return average_mu(v, pi, spec.mu_samples, rng);
    case StrategyFamily::BidEval: {
      const auto generate = [&](Rng& r) { return compute_bid(*spec.generator, v, pi, r); };
      return bid_eval(v, pi, generate, spec.candidates, spec.eval_samples, rng);
    }
    case StrategyFamily::BidEvalMix: {
      // Candidates cycle through the heuristic families, each invocation with
      // fresh randomness.
      StrategySpec smu, amu, lb;
      smu.family = StrategyFamily::StraightMU;
      smu.mu_samples = spec.mu_samples;
      amu.family = StrategyFamily::AverageMU;
      amu.mu_samples = std::max(1, spec.mu_samples);
      lb.family = StrategyFamily::LocalBid;
      lb.generator = std::make_shared<const StrategySpec>(smu);
      const StrategySpec cycle[3] = {smu, amu, lb};
      int turn = 0;
      const auto generate = [&](Rng& r) { return compute_bid(cycle[turn++ % 3], v, pi, r); };
      return bid_eval(v, pi, generate, spec.candidates, spec.eval_samples, rng);
    }
    case StrategyFamily::LocalBid: {
      const BidVector init = compute_bid(*spec.generator, v, pi, rng);
      LocalBidOptions opt;
      opt.sweeps = spec.sweeps;
      opt.num_samples = spec.opt_samples;
      opt.mode = spec.opt_samples == 0
                     ? LocalBidMode::Exact
                     : (spec.sample_mean_update ? LocalBidMode::SampleMean
                                                : LocalBidMode::EmpiricalExact);
      return local_bid(v, pi, init, opt, rng).bid;
    }
  }
  throw ConfigError("unhandled strategy family");
}

/// Binds strategy specs to an environment and a prediction store, resolving
/// each spec's prediction source.
class StrategyRunner {
 public:
  StrategyRunner(Environment env, PredictionStore store)
      : env_(env), store_(std::move(store)) {}

  const Environment& environment() const { return env_; }
  const PredictionStore& predictions() const { return store_; }

  const PricePrediction& resolve_prediction(const StrategySpec& spec) const {
    switch (spec.source.kind) {
      case PredictionSource::Kind::ScppRef:
        return store_.get(spec.source.scpp_key);
      case PredictionSource::Kind::PointPrices: {
        return intern(point_key(spec.source.point_prices),
                      point_prediction(spec.source.point_prices));
      }
      case PredictionSource::Kind::Uniform:
        return intern("!uniform", PricePrediction::uniform(env_.num_goods, env_.price_grid_max));
      case PredictionSource::Kind::Unspecified:
        // Strategies named with a statistic suffix look up their own
        // self-confirming prediction by canonical name.
        if (spec.stat_hint && store_.has(format_strategy(spec))) {
          return store_.get(format_strategy(spec));
        }
        if (spec.stat_hint) {
          throw ConfigError("no prediction registered for '" + format_strategy(spec) + "'");
        }
        return intern("!uniform", PricePrediction::uniform(env_.num_goods, env_.price_grid_max));
    }
    throw ConfigError("unhandled prediction source");
  }

  BidVector bid(const StrategySpec& spec, const Valuation& v, Rng& rng) const {
    return compute_bid(spec, v, resolve_prediction(spec), rng);
  }

 private:
  PricePrediction point_prediction(const std::vector<double>& prices) const {
    if (static_cast<int>(prices.size()) != env_.num_goods) {
      throw ConfigError("inline point prediction has wrong length");
    }
    std::vector<int> grid_prices;
    grid_prices.reserve(prices.size());
    for (double p : prices) grid_prices.push_back(static_cast<int>(std::llround(p)));
    return PricePrediction::point_mass(grid_prices, env_.price_grid_max);
  }

  static std::string point_key(const std::vector<double>& prices) {
    std::string key = "!point";
    for (double p : prices) key += ":" + std::to_string(p);
    return key;
  }

  // Bids for the same spec run concurrently across simulation instances;
  // node-based map keeps returned references stable across inserts.
  const PricePrediction& intern(const std::string& key, PricePrediction p) const {
    std::scoped_lock lock(cache_mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, std::move(p)).first->second;
  }

  Environment env_;
  PredictionStore store_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, PricePrediction> cache_;
};

}  // namespace auctionlab
