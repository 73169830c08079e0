#pragma once

#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/valuation.hpp"

namespace auctionlab {

// Predictive semantics: a bid wins a good only by strictly exceeding the
// highest other-agent bid. Mechanism execution (run_auction) instead breaks
// exact ties uniformly at random. The two must stay distinct.

/// Goods won by bidding b when the highest other-agent bids are q.
inline Bundle winnings(const BidVector& b, const PriceVector& q) {
  require_length(q.size(), b.size(), "highest-other-bid vector");
  Bundle won = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] > q[j]) won |= Bundle{1} << j;
  }
  return won;
}

/// Second-price payment: the sum of q over won goods.
inline double payment(const BidVector& b, const PriceVector& q) {
  require_length(q.size(), b.size(), "highest-other-bid vector");
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] > q[j]) total += q[j];
  }
  return total;
}

/// Value of winnings minus payment. Negative values are exposure losses.
inline double utility(const Valuation& v, const BidVector& b, const PriceVector& q) {
  require_length(b.size(), v.num_goods(), "bid vector");
  return v.value(winnings(b, q)) - payment(b, q);
}

/// Checks the BidVector invariants: length m, entries in [0, bid_cap].
inline void validate_bids(const BidVector& b, int num_goods, double bid_cap) {
  require_length(b.size(), num_goods, "bid vector");
  for (double bid : b) {
    if (!(bid >= 0.0) || bid > bid_cap) {
      throw ParameterError("bid outside [0, bid cap]");
    }
  }
}

struct AuctionResult {
  std::vector<Bundle> allocation;               // per agent, goods won
  std::vector<double> payments;                 // per agent, total paid
  std::vector<PriceVector> highest_other_bids;  // per agent, max over others per good
  PriceVector clearing_prices;                  // second-highest bid per good
};

/// Runs one simultaneous second-price sealed-bid auction over all goods.
/// Per good the unique high bidder wins, or a uniform-random pick among tied
/// high bidders; the winner pays the highest competing bid.
inline AuctionResult run_auction(const std::vector<BidVector>& all_bids, Rng& rng) {
  const int n = static_cast<int>(all_bids.size());
  if (n < 2) throw ConfigError("auction needs at least two agents");
  const std::size_t m = all_bids[0].size();
  for (const auto& b : all_bids) require_length(b.size(), m, "bid vector");

  AuctionResult result;
  result.allocation.assign(n, 0);
  result.payments.assign(n, 0.0);
  result.highest_other_bids.assign(n, PriceVector(m, 0.0));
  result.clearing_prices.assign(m, 0.0);

  for (std::size_t j = 0; j < m; ++j) {
    double high = -1.0, second = -1.0;
    int num_high = 0;
    for (int i = 0; i < n; ++i) {
      const double bid = all_bids[i][j];
      if (bid > high) {
        second = high;
        high = bid;
        num_high = 1;
      } else if (bid == high) {
        second = high;
        ++num_high;
      } else if (bid > second) {
        second = bid;
      }
    }
    int winner;
    if (num_high == 1) {
      for (winner = 0; all_bids[winner][j] != high; ++winner) {}
    } else {
      auto pick = uniform_below(rng, static_cast<std::uint64_t>(num_high));
      winner = 0;
      for (;; ++winner) {
        if (all_bids[winner][j] == high && pick-- == 0) break;
      }
    }
    result.allocation[winner] |= Bundle{1} << j;
    result.payments[winner] += second;
    result.clearing_prices[j] = second;
    for (int i = 0; i < n; ++i) {
      // Highest competing bid from agent i's viewpoint: `high` unless agent i
      // alone holds the top bid.
      result.highest_other_bids[i][j] =
          (num_high == 1 && all_bids[i][j] == high) ? second : high;
    }
  }
  return result;
}

}  // namespace auctionlab
