#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/mechanism.hpp"
#include "auctionlab/oracle.hpp"
#include "auctionlab/prediction.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/valuation.hpp"

namespace auctionlab {

/// Bids the marginal value of every good at the given point prices.
inline BidVector straight_mv(const Valuation& v, const PriceVector& point) {
  require_length(point.size(), v.num_goods(), "point prediction");
  BidVector b(v.num_goods());
  for (int j = 0; j < v.num_goods(); ++j) b[j] = marginal_value_at_prices(v, j, point);
  return b;
}

/// StraightMV at the mean of k samples from the prediction; k = 0 selects the
/// exact expected point instead of sampling.
inline BidVector straight_mu(const Valuation& v, const PricePrediction& pi, int k, Rng& rng) {
  if (k < 0) throw ParameterError("sample count must be nonnegative");
  return straight_mv(v, k == 0 ? pi.expected_point() : pi.sampled_point(k, rng));
}

/// Bids the expected marginal value: samples k price vectors, computes each
/// good's marginal value per sample, and averages.
inline BidVector average_mu(const Valuation& v, const PricePrediction& pi, int k, Rng& rng) {
  if (k < 1) throw ParameterError("sample count must be positive");
  BidVector b(v.num_goods(), 0.0);
  for (int i = 0; i < k; ++i) {
    const PriceVector p = pi.sample(rng);
    for (int j = 0; j < v.num_goods(); ++j) b[j] += marginal_value_at_prices(v, j, p);
  }
  for (double& x : b) x /= k;
  return b;
}

/// Candidate generator for BidEval: each invocation may consume fresh
/// randomness and so propose a different bid.
using CandidateGenerator = std::function<BidVector(Rng&)>;

/// Generates `candidates` bid vectors and returns the one with the best mean
/// utility on one shared set of eval_samples price draws from the prediction.
/// eval_samples = 0 evaluates candidates by exact expected utility instead.
/// Ties go to the lowest candidate index.
inline BidVector bid_eval(const Valuation& v, const PricePrediction& pi,
                          const CandidateGenerator& generate, int candidates, int eval_samples,
                          Rng& rng) {
  if (candidates < 1) throw ParameterError("candidate count must be positive");
  if (eval_samples < 0) throw ParameterError("evaluation sample count must be nonnegative");
  std::vector<BidVector> pool;
  pool.reserve(candidates);
  for (int c = 0; c < candidates; ++c) pool.push_back(generate(rng));

  std::vector<PriceVector> eval_set;
  eval_set.reserve(eval_samples);
  for (int s = 0; s < eval_samples; ++s) eval_set.push_back(pi.sample(rng));

  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < candidates; ++c) {
    double score;
    if (eval_samples == 0) {
      score = exact_expected_utility(v, pool[c], pi);
    } else {
      score = 0.0;
      for (const auto& q : eval_set) score += utility(v, pool[c], q);
      score /= eval_samples;
    }
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return pool[best];
}

namespace detail {

/// Expected marginal value of `good` given the other bids, under a
/// product-form prediction: sum over bundles of the other goods of
/// Pr(winning exactly that set) times the good's bundle marginal.
inline double expected_marginal_value(const Valuation& v, const PricePrediction& pi,
                                      const BidVector& b, int good) {
  const int m = v.num_goods();
  double total = 0.0;
  // Depth-first over goods != good, accumulating win/lose probabilities.
  std::vector<double> prob_stack(m + 1);
  std::vector<Bundle> won_stack(m + 1);
  std::vector<int> state(m + 1, 0);
  prob_stack[0] = 1.0;
  won_stack[0] = 0;
  int depth = 0;
  while (depth >= 0) {
    if (depth == m) {
      const Bundle won = won_stack[depth];
      total += prob_stack[depth] *
               (v.value(won | (Bundle{1} << good)) - v.value(won & ~(Bundle{1} << good)));
      --depth;
      continue;
    }
    if (depth == good) {
      if (state[depth] == 0) {
        state[depth] = 1;
        prob_stack[depth + 1] = prob_stack[depth];
        won_stack[depth + 1] = won_stack[depth];
        ++depth;
      } else {
        state[depth] = 0;
        --depth;
      }
      continue;
    }
    if (state[depth] == 0) {  // win branch
      state[depth] = 1;
      const double w = pi.win_probability(depth, b[depth]);
      prob_stack[depth + 1] = prob_stack[depth] * w;
      won_stack[depth + 1] = won_stack[depth] | (Bundle{1} << depth);
      ++depth;
    } else if (state[depth] == 1) {  // lose branch
      state[depth] = 2;
      const double w = pi.win_probability(depth, b[depth]);
      prob_stack[depth + 1] = prob_stack[depth] * (1.0 - w);
      won_stack[depth + 1] = won_stack[depth];
      ++depth;
    } else {
      state[depth] = 0;
      --depth;
    }
  }
  return total;
}

}  // namespace detail

enum class LocalBidMode {
  /// Update each bid to the plain mean marginal value over the joint sample
  /// rows. Follows the sampled update literally but can show small
  /// sample-noise dips in the measured mean utility.
  SampleMean,
  /// Build a product-form empirical prediction from the fixed sample set and
  /// update with exact expectations under it. Coordinate ascent on a fixed
  /// objective: mean utility is provably nondecreasing per update.
  EmpiricalExact,
  /// Exact expectations directly under the input prediction (no sampling).
  Exact,
};

struct LocalBidOptions {
  int sweeps = 10;       // K
  int num_samples = 64;  // fixed sample-set size (ignored in Exact mode)
  LocalBidMode mode = LocalBidMode::EmpiricalExact;
  double tolerance = 1e-9;  // early exit when a full sweep moves no bid by more
  bool record_eu_trace = false;
};

struct LocalBidResult {
  BidVector bid;
  int sweeps_used = 0;
  bool converged = false;
  /// Mean utility on the fixed sample set (or exact EU in the exact modes),
  /// recorded before the first update and after every coordinate update.
  std::vector<double> eu_trace;
};

/// Iterative single-good improvement: starting from an initial bid vector,
/// repeatedly set each good's bid to its expected marginal value given the
/// rest of the bid, against one fixed sample set drawn up front.
inline LocalBidResult local_bid(const Valuation& v, const PricePrediction& pi,
                                const BidVector& init, const LocalBidOptions& opt, Rng& rng) {
  require_length(init.size(), v.num_goods(), "initial bid vector");
  if (opt.sweeps < 1) throw ParameterError("sweep count must be positive");
  if (opt.mode != LocalBidMode::Exact && opt.num_samples < 1) {
    throw ParameterError("sample count must be positive");
  }
  const int m = v.num_goods();

  std::vector<PriceVector> samples;
  if (opt.mode != LocalBidMode::Exact) {
    samples.reserve(opt.num_samples);
    for (int s = 0; s < opt.num_samples; ++s) samples.push_back(pi.sample(rng));
  }

  // The measure expectations run against: the input prediction in Exact
  // mode, the sample set's per-good empirical marginals in EmpiricalExact.
  PricePrediction measure = pi;
  if (opt.mode == LocalBidMode::EmpiricalExact) {
    std::vector<std::vector<double>> mass(m, std::vector<double>(pi.grid_max() + 1, 0.0));
    for (const auto& q : samples) {
      for (int j = 0; j < m; ++j) {
        const int x = std::min(static_cast<int>(q[j]), pi.grid_max());
        mass[j][x] += 1.0;
      }
    }
    measure = PricePrediction::from_mass(std::move(mass));
  }

  const auto sample_mean_utility = [&](const BidVector& b) {
    double total = 0.0;
    for (const auto& q : samples) total += utility(v, b, q);
    return total / static_cast<double>(samples.size());
  };
  const auto current_eu = [&](const BidVector& b) {
    return opt.mode == LocalBidMode::SampleMean ? sample_mean_utility(b)
                                                : exact_expected_utility(v, b, measure);
  };

  LocalBidResult result;
  result.bid = init;
  if (opt.record_eu_trace) result.eu_trace.push_back(current_eu(result.bid));

  for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
    result.sweeps_used = sweep + 1;
    double max_change = 0.0;
    for (int j = 0; j < m; ++j) {
      double updated;
      if (opt.mode == LocalBidMode::SampleMean) {
        double total = 0.0;
        for (const auto& q : samples) {
          const Bundle won = winnings(result.bid, q);
          total += v.value(won | (Bundle{1} << j)) - v.value(won & ~(Bundle{1} << j));
        }
        updated = total / static_cast<double>(samples.size());
      } else {
        updated = detail::expected_marginal_value(v, measure, result.bid, j);
      }
      max_change = std::max(max_change, std::abs(updated - result.bid[j]));
      result.bid[j] = updated;
      if (opt.record_eu_trace) result.eu_trace.push_back(current_eu(result.bid));
    }
    if (max_change <= opt.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace auctionlab
