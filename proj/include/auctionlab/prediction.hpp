#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/rng.hpp"

namespace auctionlab {

constexpr double kMassTolerance = 1e-9;

/// A probabilistic price prediction as a product of per-good discrete
/// marginal distributions over the integer grid {0..grid_max}. Immutable
/// after construction; the joint CDF is the product of marginal CDFs.
class PricePrediction {
 public:
  /// Normalizes each marginal and builds cumulative sums. Throws if any
  /// marginal has nonpositive total mass or a negative entry.
  static PricePrediction from_mass(std::vector<std::vector<double>> mass) {
    PricePrediction p;
    if (mass.empty()) throw DimensionError("need at least one good");
    p.num_goods_ = static_cast<int>(mass.size());
    p.grid_max_ = static_cast<int>(mass[0].size()) - 1;
    if (p.grid_max_ < 0) throw DimensionError("empty price grid");
    p.mass_ = std::move(mass);
    p.cum_.resize(p.num_goods_);
    for (int j = 0; j < p.num_goods_; ++j) {
      auto& m = p.mass_[j];
      if (static_cast<int>(m.size()) != p.grid_max_ + 1) {
        throw GridMismatchError("marginals must share one grid");
      }
      double total = 0.0;
      for (double x : m) {
        if (x < 0.0) throw ParameterError("negative probability mass");
        total += x;
      }
      if (total <= 0.0) throw ParameterError("marginal has zero total mass");
      // Leave already-normalized input untouched so serialization round-trips
      // are exact on the stored decimals.
      if (std::abs(total - 1.0) > kMassTolerance) {
        for (double& x : m) x /= total;
      }
      double run = 0.0;
      p.cum_[j].resize(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        run += m[i];
        p.cum_[j][i] = run;
      }
      p.cum_[j].back() = 1.0;
    }
    return p;
  }

  static PricePrediction uniform(int num_goods, int grid_max) {
    std::vector<std::vector<double>> mass(
        num_goods, std::vector<double>(grid_max + 1, 1.0 / (grid_max + 1)));
    return from_mass(std::move(mass));
  }

  /// Point-mass marginals at the given integer prices.
  static PricePrediction point_mass(const std::vector<int>& prices, int grid_max) {
    std::vector<std::vector<double>> mass(prices.size(), std::vector<double>(grid_max + 1, 0.0));
    for (std::size_t j = 0; j < prices.size(); ++j) {
      const int p = prices[j];
      if (p < 0 || p > grid_max) throw ParameterError("point price off the grid");
      mass[j][p] = 1.0;
    }
    return from_mass(std::move(mass));
  }

  int num_goods() const { return num_goods_; }
  int grid_max() const { return grid_max_; }
  const std::vector<double>& mass(int good) const { return mass_[good]; }
  const std::vector<double>& cum(int good) const { return cum_[good]; }

  /// Marginal CDF Pr(p_j <= q), with q floored to the grid.
  double marginal_cdf(int good, double q) const {
    if (q < 0.0) return 0.0;
    const int i = std::min(static_cast<int>(std::floor(q)), grid_max_);
    return cum_[good][i];
  }

  /// Joint CDF Pr(p <= q) under the product representation.
  double cdf(const PriceVector& q) const {
    require_length(q.size(), num_goods_, "price vector");
    double prob = 1.0;
    for (int j = 0; j < num_goods_; ++j) prob *= marginal_cdf(j, q[j]);
    return prob;
  }

  /// Probability that bidding `bid` on `good` wins it: Pr(p_j < bid) under
  /// the strict-inequality win semantics.
  double win_probability(int good, double bid) const {
    if (bid <= 0.0) return 0.0;
    // Pr(p < b) = F(ceil(b) - 1).
    const double up = std::ceil(bid);
    const int i = static_cast<int>(up == bid ? bid - 1.0 : up - 1.0);
    if (i < 0) return 0.0;
    return cum_[good][std::min(i, grid_max_)];
  }

  /// Expected second-price payment on one good: sum of x * mass(x) over x < bid.
  double expected_payment(int good, double bid) const {
    double total = 0.0;
    const auto& m = mass_[good];
    for (int x = 0; x < static_cast<int>(m.size()) && x < bid; ++x) total += x * m[x];
    return total;
  }

  /// Independent inverse-CDF draws per good.
  PriceVector sample(Rng& rng) const {
    PriceVector q(num_goods_);
    for (int j = 0; j < num_goods_; ++j) {
      const double u = uniform_real01(rng);
      const auto& c = cum_[j];
      q[j] = static_cast<double>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
    }
    return q;
  }

  /// Exact per-good means over the histogram.
  PriceVector expected_point() const {
    PriceVector p(num_goods_, 0.0);
    for (int j = 0; j < num_goods_; ++j) {
      for (int x = 0; x <= grid_max_; ++x) p[j] += x * mass_[j][x];
    }
    return p;
  }

  /// Componentwise mean of k samples.
  PriceVector sampled_point(int k, Rng& rng) const {
    if (k < 1) throw ParameterError("sample count must be positive");
    PriceVector p(num_goods_, 0.0);
    for (int i = 0; i < k; ++i) {
      const PriceVector q = sample(rng);
      for (int j = 0; j < num_goods_; ++j) p[j] += q[j];
    }
    for (double& x : p) x /= k;
    return p;
  }

  bool same_grid(const PricePrediction& other) const {
    return num_goods_ == other.num_goods_ && grid_max_ == other.grid_max_;
  }

 private:
  PricePrediction() = default;
  int num_goods_ = 0;
  int grid_max_ = 0;
  std::vector<std::vector<double>> mass_;
  std::vector<std::vector<double>> cum_;
};

/// Max over goods of the one-dimensional KS distance between marginals,
/// evaluated over grid breakpoints.
inline double ks_marginal(const PricePrediction& f, const PricePrediction& g) {
  if (!f.same_grid(g)) throw GridMismatchError("ks_marginal needs a shared grid");
  double worst = 0.0;
  for (int j = 0; j < f.num_goods(); ++j) {
    for (int x = 0; x <= f.grid_max(); ++x) {
      worst = std::max(worst, std::abs(f.cum(j)[x] - g.cum(j)[x]));
    }
  }
  return worst;
}

/// Multivariate KS: sup over the full breakpoint grid of |F(q) - G(q)|.
/// Exact for product-form predictions restricted to the grid; the grid has
/// (grid_max+1)^m points, so m is capped.
inline double ks_joint(const PricePrediction& f, const PricePrediction& g) {
  if (!f.same_grid(g)) throw GridMismatchError("ks_joint needs a shared grid");
  const int m = f.num_goods();
  if (m > 4) throw CapabilityError("exact joint KS supports m <= 4; use ks_joint_sampled");
  double worst = 0.0;
  // Depth-first over goods carrying partial CDF products.
  std::vector<int> idx(m, 0);
  std::vector<double> pf(m + 1, 1.0), pg(m + 1, 1.0);
  int depth = 0;
  while (depth >= 0) {
    if (depth == m) {
      worst = std::max(worst, std::abs(pf[m] - pg[m]));
      --depth;
      continue;
    }
    if (idx[depth] > f.grid_max()) {
      idx[depth] = 0;
      --depth;
      continue;
    }
    pf[depth + 1] = pf[depth] * f.cum(depth)[idx[depth]];
    pg[depth + 1] = pg[depth] * g.cum(depth)[idx[depth]];
    ++idx[depth];
    ++depth;
  }
  return worst;
}

/// Monte Carlo lower estimate of the joint KS for larger m. Approximate by
/// construction; prefer ks_joint when the exact mode is in reach.
inline double ks_joint_sampled(const PricePrediction& f, const PricePrediction& g, int samples,
                               Rng& rng) {
  if (!f.same_grid(g)) throw GridMismatchError("ks_joint needs a shared grid");
  if (samples < 1) throw ParameterError("sample count must be positive");
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    PriceVector q(f.num_goods());
    for (int j = 0; j < f.num_goods(); ++j) {
      q[j] = static_cast<double>(uniform_int(rng, 0, f.grid_max()));
    }
    worst = std::max(worst, std::abs(f.cdf(q) - g.cdf(q)));
  }
  return worst;
}

/// Probability that bidding b wins exactly bundle X.
inline double bundle_prob(const PricePrediction& pi, const BidVector& b, Bundle x) {
  require_length(b.size(), pi.num_goods(), "bid vector");
  double prob = 1.0;
  for (int j = 0; j < pi.num_goods(); ++j) {
    const double w = pi.win_probability(j, b[j]);
    prob *= contains(x, j) ? w : 1.0 - w;
  }
  return prob;
}

/// All 2^m bundle probabilities for bid b, indexed by bundle bitmask.
inline std::vector<double> bundle_distribution(const PricePrediction& pi, const BidVector& b) {
  require_length(b.size(), pi.num_goods(), "bid vector");
  const int m = pi.num_goods();
  if (m > 20) throw CapabilityError("bundle distribution supports m <= 20");
  std::vector<double> dist(std::size_t{1} << m, 1.0);
  for (int j = 0; j < m; ++j) {
    const double w = pi.win_probability(j, b[j]);
    const Bundle bit = Bundle{1} << j;
    for (std::size_t x = 0; x < dist.size(); ++x) dist[x] *= (x & bit) ? w : 1.0 - w;
  }
  return dist;
}

/// Bundle probability distance at bid b: total variation between the
/// bundle-outcome distributions induced by the two predictions.
inline double bp_distance(const PricePrediction& f, const PricePrediction& g, const BidVector& b) {
  if (!f.same_grid(g)) throw GridMismatchError("bp_distance needs a shared grid");
  if (f.num_goods() > 6) throw CapabilityError("bp_distance supports m <= 6");
  const auto df = bundle_distribution(f, b);
  const auto dg = bundle_distribution(g, b);
  double total = 0.0;
  for (std::size_t x = 0; x < df.size(); ++x) total += std::abs(df[x] - dg[x]);
  return total / 2.0;
}

/// Convex blend per good: kappa * g + (1 - kappa) * f.
inline PricePrediction blend(const PricePrediction& f, const PricePrediction& g, double kappa) {
  if (!f.same_grid(g)) throw GridMismatchError("blend needs a shared grid");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ParameterError("kappa must be in [0,1]");
  std::vector<std::vector<double>> mass(f.num_goods());
  for (int j = 0; j < f.num_goods(); ++j) {
    mass[j].resize(f.grid_max() + 1);
    for (int x = 0; x <= f.grid_max(); ++x) {
      mass[j][x] = kappa * g.mass(j)[x] + (1.0 - kappa) * f.mass(j)[x];
    }
  }
  return PricePrediction::from_mass(std::move(mass));
}

}  // namespace auctionlab
