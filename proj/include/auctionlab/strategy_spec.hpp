#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auctionlab/common.hpp"
#include "auctionlab/textio.hpp"

namespace auctionlab {

// Compact strategy strings, e.g.
//   StraightMV(pred=point:3;4;5)
//   StraightMU8_HB
//   AverageMU64(pred=scpp:U33_HB)
//   BidEval(gen=StraightMU8,C=10,Ne=64)
//   BidEvalMix(k=8,C=10,Ne=64)
//   LocalBid(init=StraightMU8,K=10,Ns=64,pred=scpp:U33_HB)
// A trailing _HB or _price marks which outcome statistic the strategy's
// self-confirming prediction was derived from; when no pred= is given the
// runner resolves the prediction registry by the full canonical name.

enum class StrategyFamily { StraightMV, StraightMU, AverageMU, BidEval, BidEvalMix, LocalBid };

struct PredictionSource {
  enum class Kind { Unspecified, Uniform, ScppRef, PointPrices };
  Kind kind = Kind::Unspecified;
  std::string scpp_key;
  std::vector<double> point_prices;

  bool operator==(const PredictionSource&) const = default;
};

struct StrategySpec {
  StrategyFamily family = StrategyFamily::StraightMV;
  int mu_samples = 8;     // k for the MU families and BidEvalMix (0 = exact point)
  int candidates = 10;    // C
  int eval_samples = 64;  // Ne (0 = exact evaluation)
  int sweeps = 10;        // K
  int opt_samples = 64;   // Ns (0 = exact expectations under the prediction)
  bool sample_mean_update = false;  // update=mean selects the raw sampled update
  std::shared_ptr<const StrategySpec> generator;  // init= / gen=
  PredictionSource source;
  std::optional<Statistic> stat_hint;
};

namespace detail {

inline const StrategySpec& default_generator() {
  static const StrategySpec smu8 = [] {
    StrategySpec s;
    s.family = StrategyFamily::StraightMU;
    s.mu_samples = 8;
    return s;
  }();
  return smu8;
}

struct SpecCursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("strategy spec: " + why + " at position " + std::to_string(pos) + " in '" +
                     std::string(text) + "'");
  }
};

inline std::string take_word(SpecCursor& c) {
  const std::size_t start = c.pos;
  while (!c.done() && std::isalpha(static_cast<unsigned char>(c.peek()))) ++c.pos;
  return std::string(c.text.substr(start, c.pos - start));
}

inline std::optional<int> take_int(SpecCursor& c) {
  const std::size_t start = c.pos;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.pos;
  if (c.pos == start) return std::nullopt;
  return static_cast<int>(parse_int(c.text.substr(start, c.pos - start)));
}

/// Everything up to the next top-level ',' or ')' (parentheses nest).
inline std::string take_value(SpecCursor& c) {
  const std::size_t start = c.pos;
  int depth = 0;
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == '(') ++depth;
    if (ch == ')') {
      if (depth == 0) break;
      --depth;
    }
    if (ch == ',' && depth == 0) break;
    ++c.pos;
  }
  return std::string(c.text.substr(start, c.pos - start));
}

inline StrategySpec parse_spec(SpecCursor& c);

inline void apply_param(StrategySpec& spec, const std::string& key, const std::string& value,
                        SpecCursor& c) {
  const auto as_int = [&](int min_value) {
    const auto n = parse_int(value);
    if (n < min_value) c.fail("parameter " + key + " below " + std::to_string(min_value));
    return static_cast<int>(n);
  };
  if (key == "init" || key == "gen") {
    SpecCursor inner{value, 0};
    spec.generator = std::make_shared<const StrategySpec>(parse_spec(inner));
    if (!inner.done()) inner.fail("trailing characters in nested spec");
  } else if (key == "k") {
    spec.mu_samples = as_int(0);
  } else if (key == "K") {
    spec.sweeps = as_int(1);
  } else if (key == "Ns") {
    spec.opt_samples = as_int(0);
  } else if (key == "C") {
    spec.candidates = as_int(1);
  } else if (key == "Ne") {
    spec.eval_samples = as_int(0);
  } else if (key == "update") {
    if (value == "mean") {
      spec.sample_mean_update = true;
    } else if (value == "exact") {
      spec.sample_mean_update = false;
    } else {
      c.fail("unknown update mode '" + value + "'");
    }
  } else if (key == "pred") {
    if (value == "uniform") {
      spec.source.kind = PredictionSource::Kind::Uniform;
    } else if (value.rfind("scpp:", 0) == 0) {
      spec.source.kind = PredictionSource::Kind::ScppRef;
      spec.source.scpp_key = value.substr(5);
      if (spec.source.scpp_key.empty()) c.fail("empty scpp reference");
    } else if (value.rfind("point:", 0) == 0) {
      spec.source.kind = PredictionSource::Kind::PointPrices;
      for (const auto& part : split(value.substr(6), ';')) {
        spec.source.point_prices.push_back(parse_double(part));
      }
    } else {
      c.fail("unknown prediction source '" + value + "'");
    }
  } else {
    c.fail("unknown parameter '" + key + "'");
  }
}

inline StrategySpec parse_spec(SpecCursor& c) {
  StrategySpec spec;
  const std::string name = take_word(c);
  bool allows_mu_count = false;
  if (name == "StraightMV") {
    spec.family = StrategyFamily::StraightMV;
  } else if (name == "StraightMU") {
    spec.family = StrategyFamily::StraightMU;
    allows_mu_count = true;
  } else if (name == "AverageMU") {
    spec.family = StrategyFamily::AverageMU;
    allows_mu_count = true;
  } else if (name == "BidEval") {
    spec.family = StrategyFamily::BidEval;
  } else if (name == "BidEvalMix") {
    spec.family = StrategyFamily::BidEvalMix;
    spec.mu_samples = 8;
  } else if (name == "LocalBid") {
    spec.family = StrategyFamily::LocalBid;
  } else {
    c.fail("unknown strategy family '" + name + "'");
  }

  if (allows_mu_count) {
    const auto k = take_int(c);
    if (!k) c.fail("strategy " + name + " needs a sample count, e.g. " + name + "8");
    if (spec.family == StrategyFamily::AverageMU && *k < 1) {
      c.fail("AverageMU needs a positive sample count");
    }
    spec.mu_samples = *k;
  }

  if (!c.done() && c.peek() == '(') {
    ++c.pos;
    while (true) {
      const std::string key = take_word(c);
      if (key.empty()) c.fail("expected parameter name");
      if (c.done() || c.peek() != '=') c.fail("expected '=' after '" + key + "'");
      ++c.pos;
      const std::string value = take_value(c);
      apply_param(spec, key, value, c);
      if (c.done()) c.fail("unterminated parameter list");
      if (c.peek() == ')') {
        ++c.pos;
        break;
      }
      if (c.peek() != ',') c.fail("expected ',' or ')'");
      ++c.pos;
    }
  }

  if (!c.done() && c.peek() == '_') {
    ++c.pos;
    const std::size_t start = c.pos;
    while (!c.done() && c.peek() != ',' && c.peek() != ')') ++c.pos;
    const std::string suffix(c.text.substr(start, c.pos - start));
    try {
      spec.stat_hint = parse_statistic(suffix);
    } catch (const std::invalid_argument& e) {
      c.fail(e.what());
    }
  }

  if (spec.family == StrategyFamily::BidEval || spec.family == StrategyFamily::LocalBid) {
    if (!spec.generator) {
      spec.generator = std::make_shared<const StrategySpec>(default_generator());
    }
  }
  return spec;
}

}  // namespace detail

inline StrategySpec parse_strategy(const std::string& text) {
  detail::SpecCursor c{text, 0};
  StrategySpec spec = detail::parse_spec(c);
  if (!c.done()) c.fail("trailing characters");
  return spec;
}

/// Canonical form: family (with sample-count suffix for the MU families),
/// then parameters that differ from defaults in a fixed order, then the
/// statistic suffix.
inline std::string format_strategy(const StrategySpec& spec) {
  std::string name;
  std::vector<std::string> params;
  switch (spec.family) {
    case StrategyFamily::StraightMV:
      name = "StraightMV";
      break;
    case StrategyFamily::StraightMU:
      name = "StraightMU" + std::to_string(spec.mu_samples);
      break;
    case StrategyFamily::AverageMU:
      name = "AverageMU" + std::to_string(spec.mu_samples);
      break;
    case StrategyFamily::BidEval:
      name = "BidEval";
      params.push_back("gen=" + format_strategy(*spec.generator));
      params.push_back("C=" + std::to_string(spec.candidates));
      params.push_back("Ne=" + std::to_string(spec.eval_samples));
      break;
    case StrategyFamily::BidEvalMix:
      name = "BidEvalMix";
      params.push_back("k=" + std::to_string(spec.mu_samples));
      params.push_back("C=" + std::to_string(spec.candidates));
      params.push_back("Ne=" + std::to_string(spec.eval_samples));
      break;
    case StrategyFamily::LocalBid:
      name = "LocalBid";
      params.push_back("init=" + format_strategy(*spec.generator));
      params.push_back("K=" + std::to_string(spec.sweeps));
      params.push_back("Ns=" + std::to_string(spec.opt_samples));
      if (spec.sample_mean_update) params.push_back("update=mean");
      break;
  }
  switch (spec.source.kind) {
    case PredictionSource::Kind::Unspecified:
      break;
    case PredictionSource::Kind::Uniform:
      params.push_back("pred=uniform");
      break;
    case PredictionSource::Kind::ScppRef:
      params.push_back("pred=scpp:" + spec.source.scpp_key);
      break;
    case PredictionSource::Kind::PointPrices: {
      std::string p = "pred=point:";
      for (std::size_t i = 0; i < spec.source.point_prices.size(); ++i) {
        if (i) p += ';';
        p += format_double(spec.source.point_prices[i]);
      }
      params.push_back(p);
      break;
    }
  }
  std::string out = name;
  if (!params.empty()) {
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ',';
      out += params[i];
    }
    out += ')';
  }
  if (spec.stat_hint) out += std::string("_") + statistic_name(*spec.stat_hint);
  return out;
}

}  // namespace auctionlab
