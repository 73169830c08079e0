#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace auctionlab {

/// A bundle of goods as a bitmask over good indices 0..m-1.
using Bundle = std::uint32_t;

/// One bid amount per good, nonnegative reals.
using BidVector = std::vector<double>;

/// One price per good. Used both for realized highest-other-agent bids and
/// for point price predictions.
using PriceVector = std::vector<double>;

/// Which per-good outcome statistic a price prediction describes: the
/// highest other-agent bid, or the actual transaction price.
enum class Statistic { HighestOtherBid, Price };

inline const char* statistic_name(Statistic s) {
  return s == Statistic::HighestOtherBid ? "HB" : "price";
}

inline Statistic parse_statistic(const std::string& s) {
  if (s == "HB") return Statistic::HighestOtherBid;
  if (s == "price") return Statistic::Price;
  throw std::invalid_argument("unknown statistic '" + s + "' (want HB or price)");
}

inline Bundle full_bundle(int num_goods) {
  return num_goods >= 32 ? ~Bundle{0} : (Bundle{1} << num_goods) - 1;
}

inline bool contains(Bundle x, int good) {
  return (x >> good) & 1u;
}

// Error taxonomy. Operations throw the most specific type; callers that only
// care about "bad input" can catch std::invalid_argument / std::runtime_error.

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested computation exceeds the supported problem size.
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An analysis needs payoff entries that were never simulated. Carries the
/// canonical strings of the missing profiles.
struct IncompleteGameError : std::runtime_error {
  std::vector<std::string> missing_profiles;
  explicit IncompleteGameError(std::string what, std::vector<std::string> missing)
      : std::runtime_error(std::move(what)), missing_profiles(std::move(missing)) {}
};

inline void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace auctionlab
