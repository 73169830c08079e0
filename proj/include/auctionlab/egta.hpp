#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "auctionlab/environment.hpp"
#include "auctionlab/mechanism.hpp"
#include "auctionlab/parallel.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/runner.hpp"
#include "auctionlab/textio.hpp"

namespace auctionlab {

/// A symmetric pure-strategy profile: a multiset of strategy names with
/// counts summing to the player count. Canonical form sorts by name.
struct Profile {
  std::vector<std::pair<std::string, int>> entries;

  static Profile from_counts(std::map<std::string, int> counts) {
    Profile p;
    for (auto& [name, count] : counts) {
      if (count < 0) throw ParameterError("negative strategy count");
      if (count > 0) p.entries.emplace_back(name, count);
    }
    if (p.entries.empty()) throw ParameterError("empty profile");
    return p;
  }

  int total() const {
    int t = 0;
    for (const auto& [name, count] : entries) t += count;
    return t;
  }

  int count_of(const std::string& name) const {
    for (const auto& [s, count] : entries) {
      if (s == name) return count;
    }
    return 0;
  }

  /// Profile with one player moved from strategy `from` to strategy `to`.
  Profile deviate(const std::string& from, const std::string& to) const {
    if (from == to) return *this;
    std::map<std::string, int> counts;
    for (const auto& [s, count] : entries) counts[s] = count;
    if (counts[from] <= 0) throw ParameterError("no player uses strategy '" + from + "'");
    if (--counts[from] == 0) counts.erase(from);
    ++counts[to];
    return from_counts(std::move(counts));
  }

  /// Canonical text form, e.g. "A:2|B:1".
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) out += '|';
      out += entries[i].first + ":" + std::to_string(entries[i].second);
    }
    return out;
  }

  static Profile parse(const std::string& text) {
    std::map<std::string, int> counts;
    for (const auto& part : split(text, '|')) {
      const auto colon = part.rfind(':');
      if (colon == std::string::npos) throw ParseError("bad profile entry '" + part + "'");
      const int count = static_cast<int>(parse_int(part.substr(colon + 1)));
      counts[part.substr(0, colon)] += count;
    }
    return from_counts(std::move(counts));
  }

  auto operator<=>(const Profile&) const = default;
};

/// Sufficient statistics for one (profile, strategy) payoff cell. Raw sums
/// support both merging and the normal-approximation bootstrap.
struct PayoffEntry {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;

  void add(double payoff) {
    sum += payoff;
    sum_sq += payoff * payoff;
    ++count;
  }

  void merge(const PayoffEntry& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
  }

  double mean() const { return count > 0 ? sum / count : 0.0; }

  double variance() const {
    if (count < 2) return 0.0;
    return std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
  }

  static PayoffEntry from_moments(double mean, double variance, std::int64_t count) {
    PayoffEntry e;
    e.count = count;
    e.sum = mean * count;
    e.sum_sq = variance * (count - 1) + mean * mean * count;
    return e;
  }
};

/// A mixed symmetric profile over named strategies; weights sum to 1.
struct MixedProfile {
  std::vector<std::pair<std::string, double>> weights;

  void normalize() {
    double total = 0.0;
    for (auto& [name, w] : weights) total += w;
    if (total <= 0.0) throw ParameterError("mixture has no mass");
    for (auto& [name, w] : weights) w /= total;
    std::sort(weights.begin(), weights.end());
  }

  double prob_of(const std::string& name) const {
    for (const auto& [s, w] : weights) {
      if (s == name) return w;
    }
    return 0.0;
  }
};

/// Simulation-estimated symmetric game: payoffs keyed by (strategy, profile
/// multiset). Append-only with merge-by-sum semantics.
class EmpiricalGame {
 public:
  explicit EmpiricalGame(int num_players = 0) : num_players_(num_players) {}

  int num_players() const { return num_players_; }

  const std::set<std::string>& strategies() const { return strategies_; }

  void record(const Profile& profile, const std::string& strategy, const PayoffEntry& entry) {
    if (profile.total() != num_players_) {
      throw ParameterError("profile size does not match player count");
    }
    if (profile.count_of(strategy) == 0) {
      throw ParameterError("strategy '" + strategy + "' not in profile");
    }
    for (const auto& [name, count] : profile.entries) strategies_.insert(name);
    table_[profile][strategy].merge(entry);
  }

  void merge(const EmpiricalGame& other) {
    if (num_players_ == 0) num_players_ = other.num_players_;
    if (num_players_ != other.num_players_) throw ParameterError("player counts differ");
    for (const auto& [profile, row] : other.table_) {
      for (const auto& [strategy, entry] : row) record(profile, strategy, entry);
    }
  }

  bool has(const Profile& profile, const std::string& strategy) const {
    const auto it = table_.find(profile);
    return it != table_.end() && it->second.count(strategy) != 0;
  }

  const PayoffEntry& entry(const Profile& profile, const std::string& strategy) const {
    const auto it = table_.find(profile);
    if (it == table_.end() || it->second.count(strategy) == 0) {
      throw IncompleteGameError("missing payoff for " + strategy + " in " + profile.to_string(),
                                {profile.to_string()});
    }
    return it->second.at(strategy);
  }

  const std::map<Profile, std::map<std::string, PayoffEntry>>& table() const { return table_; }

  /// Seed ranges of the simulation batches behind a profile's estimates.
  void note_batch(const Profile& profile, std::uint64_t seed, std::int64_t instances) {
    batches_[profile].emplace_back(seed, instances);
  }

  std::string batch_label(const Profile& profile) const {
    const auto it = batches_.find(profile);
    if (it == batches_.end()) return "";
    std::string out;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(it->second[i].first) + ":" + std::to_string(it->second[i].second);
    }
    return out;
  }

  void restore_batches(const Profile& profile, const std::string& label) {
    if (label.empty() || batches_.count(profile)) return;
    for (const auto& part : split(label, ';')) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) throw ParseError("bad seed range '" + part + "'");
      batches_[profile].emplace_back(parse_uint(part.substr(0, colon)),
                                     parse_int(part.substr(colon + 1)));
    }
  }

 private:
  int num_players_ = 0;
  std::set<std::string> strategies_;
  std::map<Profile, std::map<std::string, PayoffEntry>> table_;
  std::map<Profile, std::vector<std::pair<std::uint64_t, std::int64_t>>> batches_;
};

/// Simulates one profile: every instance samples fresh valuations, each
/// agent bids via its strategy, and realized utilities accrue per strategy.
/// Returns the per-strategy payoff statistics for this batch.
inline std::map<std::string, PayoffEntry> simulate_profile(const StrategyRunner& runner,
                                                           const Profile& profile, int instances,
                                                           std::uint64_t seed, int workers = 0) {
  if (instances < 1) throw ParameterError("instance count must be positive");
  const Environment& env = runner.environment();
  if (profile.total() != env.num_agents) {
    throw ParameterError("profile size does not match agent count");
  }

  // Agent roster in canonical profile order.
  std::vector<const std::string*> roster;
  std::vector<StrategySpec> specs;
  specs.reserve(profile.entries.size());
  for (const auto& [name, count] : profile.entries) specs.push_back(parse_strategy(name));
  std::vector<int> spec_of_agent;
  for (std::size_t k = 0; k < profile.entries.size(); ++k) {
    for (int c = 0; c < profile.entries[k].second; ++c) {
      roster.push_back(&profile.entries[k].first);
      spec_of_agent.push_back(static_cast<int>(k));
    }
  }
  const int n = env.num_agents;

  std::vector<double> utilities(static_cast<std::size_t>(instances) * n);
  parallel_for(instances, workers, [&](std::int64_t g) {
    std::vector<BidVector> bids(n);
    std::vector<Valuation> valuations;
    valuations.reserve(n);
    for (int i = 0; i < n; ++i) {
      Rng value_rng = make_rng(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i), 0);
      valuations.push_back(env.sample_valuation(value_rng));
      Rng bid_rng = make_rng(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i), 1);
      bids[i] = runner.bid(specs[spec_of_agent[i]], valuations.back(), bid_rng);
    }
    Rng auction_rng = make_rng(seed, static_cast<std::uint64_t>(g), 0xA0C7ULL);
    const AuctionResult outcome = run_auction(bids, auction_rng);
    for (int i = 0; i < n; ++i) {
      utilities[static_cast<std::size_t>(g) * n + i] =
          valuations[i].value(outcome.allocation[i]) - outcome.payments[i];
    }
  });

  std::map<std::string, PayoffEntry> result;
  for (std::int64_t g = 0; g < instances; ++g) {
    for (int i = 0; i < n; ++i) {
      result[*roster[i]].add(utilities[static_cast<std::size_t>(g) * n + i]);
    }
  }
  return result;
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Calls fn(counts) for every way to split `total` opponents across the
/// strategy list (a multiset enumeration).
inline void for_each_split(int total, int num_strategies, std::vector<int>& counts, int index,
                           const std::function<void(const std::vector<int>&)>& fn) {
  if (index == num_strategies - 1) {
    counts[index] = total;
    fn(counts);
    return;
  }
  for (int c = 0; c <= total; ++c) {
    counts[index] = c;
    for_each_split(total - c, num_strategies, counts, index + 1, fn);
  }
}

/// Collects payoff lookups, deferring incompleteness errors so a caller can
/// report every missing profile at once.
struct PayoffReader {
  const EmpiricalGame& game;
  std::set<std::string> missing;

  double mean(const Profile& profile, const std::string& strategy) {
    if (!game.has(profile, strategy)) {
      missing.insert(profile.to_string());
      return 0.0;
    }
    return game.entry(profile, strategy).mean();
  }

  void raise_if_missing(const char* what) const {
    if (!missing.empty()) {
      throw IncompleteGameError(std::string(what) + ": missing " +
                                    std::to_string(missing.size()) + " profile(s)",
                                {missing.begin(), missing.end()});
    }
  }
};

/// Expected payoff of playing `strategy` while the other n-1 players draw
/// iid from `mix`, by exact multinomial expansion over opponent profiles.
inline double expected_payoff_vs_mixture(PayoffReader& reader, const std::string& strategy,
                                         const MixedProfile& mix, int num_players) {
  const int k = static_cast<int>(mix.weights.size());
  const int opponents = num_players - 1;
  double total = 0.0;
  std::vector<int> counts(k, 0);
  for_each_split(opponents, k, counts, 0, [&](const std::vector<int>& c) {
    double weight = factorial(opponents);
    for (int i = 0; i < k; ++i) {
      if (c[i] == 0) continue;
      weight *= std::pow(mix.weights[i].second, c[i]) / factorial(c[i]);
    }
    if (weight == 0.0) return;
    std::map<std::string, int> profile_counts;
    for (int i = 0; i < k; ++i) {
      if (c[i] > 0) profile_counts[mix.weights[i].first] += c[i];
    }
    profile_counts[strategy] += 1;
    total += weight * reader.mean(Profile::from_counts(std::move(profile_counts)), strategy);
  });
  return total;
}

}  // namespace detail

/// Regret of a pure profile: the largest gain any player can get by a
/// unilateral deviation to any strategy in the game's strategy set. The
/// identity deviation is included, so the result is never negative.
inline double regret(const EmpiricalGame& game, const Profile& profile) {
  detail::PayoffReader reader{game, {}};
  double worst = 0.0;
  for (const auto& [played, count] : profile.entries) {
    const double base = reader.mean(profile, played);
    for (const auto& alternative : game.strategies()) {
      const double gain = reader.mean(profile.deviate(played, alternative), alternative) - base;
      worst = std::max(worst, gain);
    }
  }
  reader.raise_if_missing("regret");
  return worst;
}

/// Expected payoff of each pure strategy against n-1 opponents drawn from
/// the mixture, plus the mixture's own expected payoff.
inline double mixture_payoff(const EmpiricalGame& game, const MixedProfile& mix,
                             const std::string& strategy) {
  detail::PayoffReader reader{game, {}};
  const double u = detail::expected_payoff_vs_mixture(reader, strategy, mix, game.num_players());
  reader.raise_if_missing("mixture payoff");
  return u;
}

inline double mixture_self_payoff(const EmpiricalGame& game, const MixedProfile& mix) {
  detail::PayoffReader reader{game, {}};
  double total = 0.0;
  for (const auto& [name, w] : mix.weights) {
    if (w > 0.0) total += w * detail::expected_payoff_vs_mixture(reader, name, mix, game.num_players());
  }
  reader.raise_if_missing("mixture payoff");
  return total;
}

/// NE regret of strategy s relative to a (candidate) equilibrium mixture:
/// the equilibrium's expected payoff minus s's expected payoff against it.
inline double ne_regret(const EmpiricalGame& game, const MixedProfile& equilibrium,
                        const std::string& strategy) {
  return mixture_self_payoff(game, equilibrium) - mixture_payoff(game, equilibrium, strategy);
}

/// Regret of a mixture against deviations to every strategy in the game.
inline double mixture_regret(const EmpiricalGame& game, const MixedProfile& mix) {
  const double self = mixture_self_payoff(game, mix);
  double worst = 0.0;
  for (const auto& s : game.strategies()) {
    worst = std::max(worst, mixture_payoff(game, mix, s) - self);
  }
  return worst;
}

struct ReplicatorOptions {
  int iterations = 2000;
  int restarts = 20;
  double tolerance = 1e-6;  // support-restricted regret accepted as a fixed point
};

/// Discrete-time replicator dynamics restricted to a candidate support, from
/// a uniform start plus random restarts. Returns distinct fixed points whose
/// support-restricted regret is below tolerance, sorted by regret.
inline std::vector<MixedProfile> replicator_solve(const EmpiricalGame& game,
                                                  const std::vector<std::string>& support,
                                                  const ReplicatorOptions& opt, Rng& rng) {
  if (support.empty()) throw ParameterError("empty support");
  const int k = static_cast<int>(support.size());

  const auto run_from = [&](std::vector<double> x) -> MixedProfile {
    MixedProfile mix;
    for (int i = 0; i < k; ++i) mix.weights.emplace_back(support[i], x[i]);
    mix.normalize();
    for (int it = 0; it < opt.iterations; ++it) {
      std::vector<double> payoff(k);
      double low = std::numeric_limits<double>::infinity();
      double high = -low;
      for (int i = 0; i < k; ++i) {
        payoff[i] = mixture_payoff(game, mix, mix.weights[i].first);
        low = std::min(low, payoff[i]);
        high = std::max(high, payoff[i]);
      }
      if (high - low <= opt.tolerance * 0.1) break;
      // Positive affine shift keeps growth rates well-defined; fixed points
      // (equal payoffs on support) are unchanged.
      const double shift = (high - low) + 1e-12 - low;
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        mix.weights[i].second *= payoff[i] + shift;
        total += mix.weights[i].second;
      }
      for (int i = 0; i < k; ++i) mix.weights[i].second /= total;
    }
    return mix;
  };

  // Support-restricted regret: best support deviation minus own payoff.
  const auto restricted_regret = [&](const MixedProfile& mix) {
    double self = 0.0;
    std::vector<double> payoff(k);
    for (int i = 0; i < k; ++i) {
      payoff[i] = mixture_payoff(game, mix, mix.weights[i].first);
      self += mix.weights[i].second * payoff[i];
    }
    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, payoff[i] - self);
    return worst;
  };

  std::vector<MixedProfile> found;
  for (int start = 0; start <= opt.restarts; ++start) {
    std::vector<double> x(k, 1.0);
    if (start > 0) {
      for (int i = 0; i < k; ++i) x[i] = -std::log(1.0 - uniform_real01(rng));
    }
    MixedProfile mix = run_from(std::move(x));
    if (restricted_regret(mix) > opt.tolerance) continue;
    bool duplicate = false;
    for (const auto& other : found) {
      double dist = 0.0;
      for (const auto& [name, w] : mix.weights) dist = std::max(dist, std::abs(w - other.prob_of(name)));
      if (dist < 1e-4) duplicate = true;
    }
    if (!duplicate) found.push_back(std::move(mix));
  }
  std::sort(found.begin(), found.end(), [&](const MixedProfile& a, const MixedProfile& b) {
    return restricted_regret(a) < restricted_regret(b);
  });
  return found;
}

/// One-tailed upper confidence bound on a mixture's regret: resamples every
/// payoff cell from the normal approximation of its sampling noise,
/// recomputes the mixture regret, and returns the requested quantile.
inline double bootstrap_regret_bound(const EmpiricalGame& game, const MixedProfile& equilibrium,
                                     int resamples, double quantile, Rng& rng) {
  if (resamples < 1) throw ParameterError("resample count must be positive");
  if (!(quantile > 0.0 && quantile < 1.0)) throw ParameterError("quantile must be in (0,1)");
  std::vector<double> regrets;
  regrets.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    EmpiricalGame resampled(game.num_players());
    for (const auto& [profile, row] : game.table()) {
      for (const auto& [strategy, e] : row) {
        const double se = e.count > 0 ? std::sqrt(e.variance() / e.count) : 0.0;
        const double mean = e.mean() + se * standard_normal(rng);
        resampled.record(profile, strategy, PayoffEntry::from_moments(mean, 0.0, e.count));
      }
    }
    regrets.push_back(mixture_regret(resampled, equilibrium));
  }
  std::sort(regrets.begin(), regrets.end());
  const auto idx = static_cast<std::size_t>(
      std::min<double>(resamples - 1.0, std::ceil(quantile * resamples) - 1.0));
  return regrets[idx];
}

// ---- payoff table CSV ----

/// Header comments carry provenance; each row is one (profile, strategy)
/// cell with its seed range.
inline std::string serialize_payoffs(const EmpiricalGame& game,
                                     const std::map<std::string, std::string>& meta) {
  std::string out = "# auctionlab-payoffs v1\n";
  out += "# players=" + std::to_string(game.num_players()) + "\n";
  for (const auto& [key, value] : meta) out += "# " + key + "=" + value + "\n";
  out += "profile,strategy,mean,variance,count,seed_range\n";
  for (const auto& [profile, row] : game.table()) {
    for (const auto& [strategy, e] : row) {
      out += csv_field(profile.to_string()) + "," + csv_field(strategy) + "," +
             format_double(e.mean()) + "," + format_double(e.variance()) + "," +
             std::to_string(e.count) + "," + csv_field(game.batch_label(profile)) + "\n";
    }
  }
  return out;
}

inline EmpiricalGame deserialize_payoffs(const std::string& text) {
  EmpiricalGame game(0);
  int players = 0;
  bool seen_header = false;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("players=");
      if (pos != std::string::npos) players = static_cast<int>(parse_int(line.substr(pos + 8)));
      continue;
    }
    if (!seen_header) {
      seen_header = true;  // column header
      continue;
    }
    const auto fields = csv_split(line);
    if (fields.size() < 5) {
      throw ParseError("payoff CSV line " + std::to_string(line_no) + ": expected 5+ fields");
    }
    if (players <= 0) throw ParseError("payoff CSV missing '# players=' header");
    if (game.num_players() == 0) game = EmpiricalGame(players);
    const Profile profile = Profile::parse(fields[0]);
    game.record(profile, fields[1],
                PayoffEntry::from_moments(parse_double(fields[2]), parse_double(fields[3]),
                                          parse_int(fields[4])));
    if (fields.size() >= 6) game.restore_batches(profile, fields[5]);
  }
  if (game.num_players() == 0) game = EmpiricalGame(players);
  return game;
}

}  // namespace auctionlab
