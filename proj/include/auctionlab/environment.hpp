#pragma once

#include <string>

#include "auctionlab/common.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/valuation.hpp"

namespace auctionlab {

enum class ValuationFamily { Scheduling, Homogeneous };

/// A symmetric IPV auction environment: valuation family plus numbers of
/// goods and agents, written "U[m,n]" (scheduling) or "H[m,n]" (homogeneous).
struct Environment {
  ValuationFamily family = ValuationFamily::Scheduling;
  int num_goods = 0;
  int num_agents = 0;
  /// Price grid upper bound for predictions and tallies. Defaults to the
  /// family's single-good value cap.
  int price_grid_max = 0;

  static Environment make(ValuationFamily family, int num_goods, int num_agents,
                          int price_grid_max = -1) {
    if (num_goods < 1) throw ConfigError("environment needs at least one good");
    if (num_agents < 2) throw ConfigError("environment needs at least two agents");
    Environment env;
    env.family = family;
    env.num_goods = num_goods;
    env.num_agents = num_agents;
    env.price_grid_max =
        price_grid_max >= 0
            ? price_grid_max
            : (family == ValuationFamily::Scheduling ? kSchedulingValueCap : kHomogeneousValueCap);
    return env;
  }

  /// Upper bound on any bundle value under this distribution.
  double value_bound() const {
    return family == ValuationFamily::Scheduling
               ? static_cast<double>(kSchedulingValueCap)
               : static_cast<double>(kHomogeneousValueCap) * num_goods;
  }

  /// Per-good bid cap. One step above the price grid so a certain-win bid is
  /// expressible under strict-inequality semantics.
  double bid_cap() const { return price_grid_max + 1.0; }

  std::string label() const {
    const char tag = family == ValuationFamily::Scheduling ? 'U' : 'H';
    return std::string(1, tag) + "[" + std::to_string(num_goods) + "," +
           std::to_string(num_agents) + "]";
  }

  static Environment parse(const std::string& label, int price_grid_max = -1) {
    if (label.size() < 6 || label[1] != '[' || label.back() != ']') {
      throw ParseError("bad environment label: '" + label + "' (want U[m,n] or H[m,n])");
    }
    ValuationFamily family;
    if (label[0] == 'U') {
      family = ValuationFamily::Scheduling;
    } else if (label[0] == 'H') {
      family = ValuationFamily::Homogeneous;
    } else {
      throw ParseError("unknown valuation family '" + label.substr(0, 1) + "'");
    }
    const auto comma = label.find(',');
    if (comma == std::string::npos) throw ParseError("bad environment label: '" + label + "'");
    try {
      const int m = std::stoi(label.substr(2, comma - 2));
      const int n = std::stoi(label.substr(comma + 1, label.size() - comma - 2));
      return make(family, m, n, price_grid_max);
    } catch (const std::invalid_argument&) {
      throw ParseError("bad environment label: '" + label + "'");
    }
  }

  Valuation sample_valuation(Rng& rng) const {
    if (family == ValuationFamily::Scheduling) {
      return tabulate(sample_scheduling_valuation(num_goods, rng));
    }
    return tabulate(sample_homogeneous_valuation(num_goods, rng));
  }
};

}  // namespace auctionlab
