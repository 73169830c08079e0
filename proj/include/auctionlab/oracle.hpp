#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/mechanism.hpp"
#include "auctionlab/parallel.hpp"
#include "auctionlab/prediction.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/valuation.hpp"

namespace auctionlab {

/// Exact expected utility of bid b against a product-form prediction:
/// expected value of winnings via the 2^m bundle distribution, minus the
/// per-good expected second-price payments.
inline double exact_expected_utility(const Valuation& v, const BidVector& b,
                                     const PricePrediction& pi) {
  require_length(b.size(), v.num_goods(), "bid vector");
  if (pi.num_goods() != v.num_goods()) throw GridMismatchError("prediction/valuation mismatch");
  if (v.num_goods() > 6) throw CapabilityError("exact expected utility supports m <= 6");
  const auto dist = bundle_distribution(pi, b);
  double eu = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) eu += dist[x] * v.value(static_cast<Bundle>(x));
  for (int j = 0; j < v.num_goods(); ++j) eu -= pi.expected_payment(j, b[j]);
  return eu;
}

/// Precomputed per-good win probabilities and expected payments for every
/// bid on a step grid; the grid ends one step past grid_max so a
/// win-with-certainty bid is expressible under strict semantics.
struct BidGrid {
  std::vector<double> levels;
  std::vector<std::vector<double>> win_prob;  // [good][level]
  std::vector<std::vector<double>> exp_pay;   // [good][level]

  BidGrid(const PricePrediction& pi, double step) {
    if (!(step > 0.0)) throw ParameterError("grid step must be positive");
    for (double bid = 0.0;; bid += step) {
      if (bid > pi.grid_max()) {
        levels.push_back(pi.grid_max() + step);
        break;
      }
      levels.push_back(bid);
    }
    win_prob.resize(pi.num_goods());
    exp_pay.resize(pi.num_goods());
    for (int j = 0; j < pi.num_goods(); ++j) {
      win_prob[j].reserve(levels.size());
      exp_pay[j].reserve(levels.size());
      for (double bid : levels) {
        win_prob[j].push_back(pi.win_probability(j, bid));
        exp_pay[j].push_back(pi.expected_payment(j, bid));
      }
    }
  }
};

namespace detail {

/// Recursive expansion of expected bundle value over goods >= depth, carrying
/// the probability-weighted partial bundle. Linear pass per leaf avoided by
/// branching on win/lose per good.
inline double expected_value_rec(const Valuation& v, const BidGrid& grid,
                                 const std::vector<int>& level, int depth, Bundle won,
                                 double prob) {
  if (prob == 0.0) return 0.0;
  if (depth == v.num_goods()) return prob * v.value(won);
  const double w = grid.win_prob[depth][level[depth]];
  const Bundle bit = Bundle{1} << depth;
  return expected_value_rec(v, grid, level, depth + 1, won | bit, prob * w) +
         expected_value_rec(v, grid, level, depth + 1, won, prob * (1.0 - w));
}

}  // namespace detail

/// Exhaustive grid search for the expected-utility-maximizing bid vector.
/// Ties break to the lexicographically smallest bid. m <= 3 at fine steps;
/// the level count is capped to keep the search tractable.
inline std::pair<BidVector, double> optimal_bid(const Valuation& v, const PricePrediction& pi,
                                                double grid_step) {
  if (pi.num_goods() != v.num_goods()) throw GridMismatchError("prediction/valuation mismatch");
  const int m = v.num_goods();
  if (m > 5) throw CapabilityError("optimal bid search supports m <= 5");
  const BidGrid grid(pi, grid_step);
  const double levels = static_cast<double>(grid.levels.size());
  if (std::pow(levels, m) > 64e6) {
    throw CapabilityError("bid grid too large; coarsen grid_step");
  }

  std::vector<int> level(m, 0);
  BidVector best_bid(m, 0.0);
  double best_eu = -std::numeric_limits<double>::infinity();
  for (;;) {
    double eu = detail::expected_value_rec(v, grid, level, 0, 0, 1.0);
    for (int j = 0; j < m; ++j) eu -= grid.exp_pay[j][level[j]];
    if (eu > best_eu) {
      best_eu = eu;
      for (int j = 0; j < m; ++j) best_bid[j] = grid.levels[level[j]];
    }
    int j = m - 1;
    while (j >= 0 && ++level[j] == static_cast<int>(grid.levels.size())) level[j--] = 0;
    if (j < 0) break;
  }
  return {best_bid, best_eu};
}

struct OracleReport {
  BidVector optimal_bid;
  double optimal_eu = 0.0;
  BidVector strategy_bid;
  double strategy_eu = 0.0;
};

/// A bid supplier under a fixed prediction: (valuation, rng) -> bid vector.
using Bidder = std::function<BidVector(const Valuation&, Rng&)>;

struct OptimalityTrial {
  double strategy_eu = 0.0;
  double optimal_eu = 0.0;
};

struct OptimalitySummary {
  double mean_strategy_eu = 0.0;
  double mean_optimal_eu = 0.0;
  double ratio = 0.0;  // of means; defined when mean optimal EU > 0
  std::vector<OptimalityTrial> trials;
};

/// Samples valuations, pits the strategy's exact EU against the grid
/// optimum, and reports the ratio of means plus per-trial scatter.
inline OptimalitySummary optimality_ratio(
    const Bidder& bidder, const std::function<Valuation(Rng&)>& sample_valuation,
    const PricePrediction& pi, int trials, double grid_step, std::uint64_t seed,
    int workers = 0) {
  if (trials < 1) throw ParameterError("trial count must be positive");
  OptimalitySummary summary;
  summary.trials.resize(trials);
  parallel_for(trials, workers, [&](std::int64_t t) {
    Rng value_rng = make_rng(seed, static_cast<std::uint64_t>(t), 0);
    const Valuation v = sample_valuation(value_rng);
    Rng bid_rng = make_rng(seed, static_cast<std::uint64_t>(t), 1);
    const BidVector bid = bidder(v, bid_rng);
    summary.trials[t].strategy_eu = exact_expected_utility(v, bid, pi);
    summary.trials[t].optimal_eu = optimal_bid(v, pi, grid_step).second;
  });
  for (const auto& trial : summary.trials) {
    summary.mean_strategy_eu += trial.strategy_eu;
    summary.mean_optimal_eu += trial.optimal_eu;
  }
  summary.mean_strategy_eu /= trials;
  summary.mean_optimal_eu /= trials;
  summary.ratio = summary.mean_optimal_eu > 0.0 ? summary.mean_strategy_eu / summary.mean_optimal_eu
                                                : 0.0;
  return summary;
}

}  // namespace auctionlab
