#pragma once

#include <algorithm>
#include <bit>
#include <limits>
#include <optional>
#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/rng.hpp"

namespace auctionlab {

/// A total bundle-to-value mapping, tabulated as a 2^m array so inner loops
/// are O(1) lookups. Instances are immutable after construction and safe to
/// share across threads.
class Valuation {
 public:
  Valuation(int num_goods, std::vector<double> table)
      : num_goods_(num_goods), table_(std::move(table)) {
    if (num_goods < 0 || num_goods > kMaxGoods) {
      throw CapabilityError("valuation supports at most " + std::to_string(kMaxGoods) + " goods");
    }
    if (table_.size() != (std::size_t{1} << num_goods_)) {
      throw DimensionError("valuation table must have 2^m entries");
    }
    upper_bound_ = table_[full_bundle(num_goods_)];
  }

  int num_goods() const { return num_goods_; }

  double value(Bundle x) const { return table_[x]; }

  /// Maximum achievable value; equals the full-bundle value under free disposal.
  double upper_bound() const { return upper_bound_; }

  /// Free disposal: X subset of X' implies v(X) <= v(X'). It suffices to
  /// check one-good extensions.
  bool satisfies_free_disposal() const {
    const Bundle n = full_bundle(num_goods_);
    for (Bundle x = 0; x <= n; ++x) {
      for (int j = 0; j < num_goods_; ++j) {
        if (!contains(x, j) && table_[x | (Bundle{1} << j)] < table_[x]) return false;
      }
      if (x == n) break;
    }
    return true;
  }

  static constexpr int kMaxGoods = 20;

 private:
  int num_goods_;
  std::vector<double> table_;
  double upper_bound_;
};

/// Market-based scheduling instance: a task needing `task_length` of the m
/// time slots, worth completion_values[t-1] when finished by time t.
struct SchedulingValuation {
  int num_goods = 0;
  int task_length = 0;                  // lambda in {1..m}
  std::vector<int> completion_values;   // V^1..V^m, nonincreasing
};

/// Perfect-substitutes instance: value depends only on the number of goods
/// obtained, with weakly decreasing unit marginals.
struct HomogeneousValuation {
  int num_goods = 0;
  std::vector<int> unit_marginals;  // marginal value of the k-th unit, nonincreasing
};

/// Earliest time t such that bundle X contains at least `lambda` of the slots
/// {1..t} (goods are 0-indexed; slot j covers time j+1). nullopt when X never
/// accumulates lambda slots.
inline std::optional<int> completion_time(Bundle x, int lambda, int num_goods) {
  if (lambda < 1 || lambda > num_goods) {
    throw ParameterError("task length must be in {1..m}");
  }
  int have = 0;
  for (int j = 0; j < num_goods; ++j) {
    if (contains(x, j) && ++have == lambda) return j + 1;
  }
  return std::nullopt;
}

inline Valuation tabulate(const SchedulingValuation& sv) {
  const int m = sv.num_goods;
  if (static_cast<int>(sv.completion_values.size()) != m) {
    throw DimensionError("scheduling valuation needs one completion value per slot");
  }
  std::vector<double> table(std::size_t{1} << m, 0.0);
  for (Bundle x = 1; x < table.size(); ++x) {
    const auto t = completion_time(x, sv.task_length, m);
    table[x] = t ? static_cast<double>(sv.completion_values[*t - 1]) : 0.0;
  }
  return Valuation(m, std::move(table));
}

inline Valuation tabulate(const HomogeneousValuation& hv) {
  const int m = hv.num_goods;
  if (static_cast<int>(hv.unit_marginals.size()) != m) {
    throw DimensionError("homogeneous valuation needs one marginal per unit");
  }
  std::vector<double> by_count(m + 1, 0.0);
  for (int k = 1; k <= m; ++k) by_count[k] = by_count[k - 1] + hv.unit_marginals[k - 1];
  std::vector<double> table(std::size_t{1} << m);
  for (Bundle x = 0; x < table.size(); ++x) table[x] = by_count[std::popcount(x)];
  return Valuation(m, std::move(table));
}

/// Backward running maximum: every draw stays a lower bound and the result is
/// nonincreasing.
inline void prune_nonincreasing(std::vector<int>& values) {
  for (int t = static_cast<int>(values.size()) - 2; t >= 0; --t) {
    values[t] = std::max(values[t], values[t + 1]);
  }
}

/// Task length uniform on {1..m}; completion values iid uniform on {1..50},
/// pruned to be nonincreasing.
inline SchedulingValuation sample_scheduling_valuation(int m, Rng& rng) {
  SchedulingValuation sv;
  sv.num_goods = m;
  sv.task_length = static_cast<int>(uniform_int(rng, 1, m));
  sv.completion_values.resize(m);
  for (int t = 0; t < m; ++t) sv.completion_values[t] = static_cast<int>(uniform_int(rng, 1, 50));
  prune_nonincreasing(sv.completion_values);
  return sv;
}

constexpr int kSchedulingValueCap = 50;
constexpr int kHomogeneousValueCap = 127;

/// First-unit marginal uniform on {0..127}; each later marginal uniform on
/// {0..previous}.
inline HomogeneousValuation sample_homogeneous_valuation(int m, Rng& rng) {
  HomogeneousValuation hv;
  hv.num_goods = m;
  hv.unit_marginals.resize(m);
  int cap = kHomogeneousValueCap;
  for (int k = 0; k < m; ++k) {
    hv.unit_marginals[k] = static_cast<int>(uniform_int(rng, 0, cap));
    cap = hv.unit_marginals[k];
  }
  return hv;
}

/// Surplus from obtaining bundle X at prices p: v(X) minus the prices of X.
inline double surplus(const Valuation& v, Bundle x, const PriceVector& p) {
  require_length(p.size(), v.num_goods(), "price vector");
  double total = v.value(x);
  for (int j = 0; j < v.num_goods(); ++j) {
    if (contains(x, j)) total -= p[j];
  }
  return total;
}

struct Acquisition {
  Bundle bundle = 0;
  double surplus = 0.0;
};

/// The acquisition problem: surplus-maximizing bundle at fixed prices, by
/// exhaustive enumeration. Ties break to the lexicographically smallest
/// bitmask. The empty bundle keeps the optimum at >= 0.
inline Acquisition acquire(const Valuation& v, const PriceVector& p) {
  require_length(p.size(), v.num_goods(), "price vector");
  Acquisition best;  // X = 0 with surplus 0
  const Bundle n = full_bundle(v.num_goods());
  for (Bundle x = 1; x <= n; ++x) {
    double s = v.value(x);
    for (Bundle rest = x; rest != 0; rest &= rest - 1) s -= p[std::countr_zero(rest)];
    if (s > best.surplus) best = {x, s};
    if (x == n) break;
  }
  return best;
}

/// Marginal value of a good relative to a fixed bundle X not containing it.
inline double marginal_value_bundle(const Valuation& v, int good, Bundle x) {
  if (good < 0 || good >= v.num_goods()) throw ParameterError("good index out of range");
  if (contains(x, good)) throw ParameterError("good already in bundle");
  return v.value(x | (Bundle{1} << good)) - v.value(x);
}

/// Any price above the valuation's bound excludes a good from every optimal
/// bundle, so this stands in for an infinite price.
inline double exclusion_price(const Valuation& v) { return v.upper_bound() + 1.0; }

/// Marginal value of good j at prices p: optimal surplus with j free minus
/// optimal surplus with j unavailable.
inline double marginal_value_at_prices(const Valuation& v, int good, const PriceVector& p) {
  require_length(p.size(), v.num_goods(), "price vector");
  if (good < 0 || good >= v.num_goods()) throw ParameterError("good index out of range");
  PriceVector q = p;
  q[good] = 0.0;
  const double with_free = acquire(v, q).surplus;
  q[good] = exclusion_price(v);
  const double without = acquire(v, q).surplus;
  return with_free - without;
}

}  // namespace auctionlab
