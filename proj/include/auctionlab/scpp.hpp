#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "auctionlab/environment.hpp"
#include "auctionlab/mechanism.hpp"
#include "auctionlab/parallel.hpp"
#include "auctionlab/prediction.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/runner.hpp"
#include "auctionlab/strategy_spec.hpp"

namespace auctionlab {

/// Damping schedule for the prediction update, indexed from iteration 1.
/// kappa = 0 selects the running-average schedule 1/t; a value in (0,1]
/// selects that constant.
struct KappaSchedule {
  double constant = 0.0;

  double at(int t) const { return constant > 0.0 ? constant : 1.0 / t; }

  static KappaSchedule running_average() { return {0.0}; }
  static KappaSchedule fixed(double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ParameterError("kappa must be in (0,1]");
    return {kappa};
  }
};

struct ScppConfig {
  StrategySpec strategy;
  Environment environment;
  Statistic statistic = Statistic::HighestOtherBid;
  int games_per_iteration = 10000;  // G
  int max_iterations = 50;          // L
  KappaSchedule kappa;              // default 1/t
  double tau = 0.05;                // KS_marg convergence threshold
  std::uint64_t seed = 0;
  /// Tally every agent's viewpoint instead of one uniformly-chosen reference
  /// agent per instance. Estimates agree in expectation.
  bool all_viewpoints = false;
  int workers = 0;  // 0 = all cores

  void validate() const {
    if (games_per_iteration < 1) throw ConfigError("games per iteration must be positive");
    if (max_iterations < 1) throw ConfigError("iteration cap must be positive");
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  }
};

struct ScppResult {
  PricePrediction prediction = PricePrediction::uniform(1, 1);
  int iterations_used = 0;
  bool converged = false;
  double final_ks_marg = 0.0;
  std::vector<double> ks_trace;  // KS_marg(F, F') per iteration
};

/// Seed for iteration t of a derivation; exposed so an independent replay of
/// the final tally can reproduce it exactly.
inline std::uint64_t scpp_iteration_seed(std::uint64_t master, int iteration) {
  return derive_seed(master, 0x5c99ULL, static_cast<std::uint64_t>(iteration));
}

/// Simulates G game instances with every agent bidding via strategy(F) on a
/// fresh valuation, and tallies the per-good outcome statistic into a
/// normalized histogram. Outcomes are floored to the integer grid; integer
/// counts make the merge order-independent, so the tally does not depend on
/// worker count.
inline PricePrediction tally_outcomes(const StrategySpec& strategy, const PricePrediction& f,
                                      const Environment& env, int games, Statistic stat,
                                      std::uint64_t seed, bool all_viewpoints = false,
                                      int workers = 0) {
  if (games < 1) throw ConfigError("game count must be positive");
  const int n = env.num_agents;
  const int m = env.num_goods;
  const int grid = env.price_grid_max;

  // Each instance writes its binned outcomes into its own slot; the bins are
  // then counted sequentially, so the tally is independent of worker count.
  const int viewpoints = (stat == Statistic::HighestOtherBid && all_viewpoints) ? n : 1;
  const std::size_t stride = static_cast<std::size_t>(m) * viewpoints;
  std::vector<std::int16_t> bins(static_cast<std::size_t>(games) * stride);
  parallel_for(games, workers, [&](std::int64_t g) {
    std::vector<BidVector> bids(n);
    for (int i = 0; i < n; ++i) {
      Rng value_rng = make_rng(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i), 0);
      const Valuation v = env.sample_valuation(value_rng);
      Rng bid_rng = make_rng(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i), 1);
      bids[i] = compute_bid(strategy, v, f, bid_rng);
    }
    Rng auction_rng = make_rng(seed, static_cast<std::uint64_t>(g), 0xA0C7ULL);
    const AuctionResult outcome = run_auction(bids, auction_rng);

    std::int16_t* slot = bins.data() + static_cast<std::size_t>(g) * stride;
    const auto record = [&](const PriceVector& prices) {
      for (int j = 0; j < m; ++j) {
        int bin = static_cast<int>(prices[j]);  // floor; prices are >= 0
        if (bin > grid) bin = grid;
        *slot++ = static_cast<std::int16_t>(bin);
      }
    };
    if (stat == Statistic::Price) {
      record(outcome.clearing_prices);
    } else if (all_viewpoints) {
      for (int i = 0; i < n; ++i) record(outcome.highest_other_bids[i]);
    } else {
      Rng ref_rng = make_rng(seed, static_cast<std::uint64_t>(g), 0x5EFULL);
      const int ref = static_cast<int>(uniform_below(ref_rng, n));
      record(outcome.highest_other_bids[ref]);
    }
  });

  std::vector<std::vector<double>> mass(m, std::vector<double>(grid + 1, 0.0));
  for (std::int64_t g = 0; g < games; ++g) {
    const std::int16_t* slot = bins.data() + static_cast<std::size_t>(g) * stride;
    for (int view = 0; view < viewpoints; ++view) {
      for (int j = 0; j < m; ++j) mass[j][*slot++] += 1.0;
    }
  }
  return PricePrediction::from_mass(std::move(mass));
}

/// Self-confirming price search: start from the uniform prediction, tally
/// outcomes with all agents playing strategy(F), stop when KS_marg(F, F')
/// falls below tau, else blend F' into F and iterate.
inline ScppResult derive_scpp(const ScppConfig& cfg) {
  cfg.validate();
  ScppResult result;
  PricePrediction f =
      PricePrediction::uniform(cfg.environment.num_goods, cfg.environment.price_grid_max);
  for (int t = 1; t <= cfg.max_iterations; ++t) {
    const PricePrediction tally =
        tally_outcomes(cfg.strategy, f, cfg.environment, cfg.games_per_iteration, cfg.statistic,
                       scpp_iteration_seed(cfg.seed, t), cfg.all_viewpoints, cfg.workers);
    const double ks = ks_marginal(f, tally);
    result.ks_trace.push_back(ks);
    result.iterations_used = t;
    result.final_ks_marg = ks;
    if (ks < cfg.tau) {
      result.converged = true;
      break;
    }
    f = blend(f, tally, cfg.kappa.at(t));
  }
  result.prediction = std::move(f);
  return result;
}

/// Operational self-confirmation score: independent replay of G_check
/// instances with all agents playing strategy(F), returning KS_marg between
/// F and the fresh empirical tally.
inline double verify_self_confirming(const StrategySpec& strategy, const PricePrediction& f,
                                     const Environment& env, int games_check, Statistic stat,
                                     std::uint64_t seed, bool all_viewpoints = false,
                                     int workers = 0) {
  const PricePrediction tally =
      tally_outcomes(strategy, f, env, games_check, stat, seed, all_viewpoints, workers);
  return ks_marginal(f, tally);
}

}  // namespace auctionlab
