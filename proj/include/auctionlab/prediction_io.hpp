#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "auctionlab/prediction.hpp"
#include "auctionlab/textio.hpp"

namespace auctionlab {

/// A prediction plus the provenance recorded when it was derived. The text
/// format is line-based; doubles are written in shortest round-trip form, so
/// saving a loaded file reproduces it byte for byte.
struct PredictionFile {
  PricePrediction prediction = PricePrediction::uniform(1, 1);
  std::string environment_label;
  std::string statistic;  // "HB" or "price"
  std::string strategy;
  std::int64_t iterations = 0;
  std::int64_t games_per_iteration = 0;
  double final_ks_marg = 0.0;
  std::string config_hash;
  std::uint64_t master_seed = 0;

  std::string serialize() const {
    std::string out = "auctionlab-prediction v1\n";
    out += "environment " + environment_label + "\n";
    out += "statistic " + statistic + "\n";
    out += "goods " + std::to_string(prediction.num_goods()) + "\n";
    out += "grid_max " + std::to_string(prediction.grid_max()) + "\n";
    out += "strategy " + strategy + "\n";
    out += "iterations " + std::to_string(iterations) + "\n";
    out += "games_per_iteration " + std::to_string(games_per_iteration) + "\n";
    out += "final_ks_marg " + format_double(final_ks_marg) + "\n";
    out += "config_hash " + config_hash + "\n";
    out += "master_seed " + std::to_string(master_seed) + "\n";
    for (int j = 0; j < prediction.num_goods(); ++j) {
      out += "mass " + std::to_string(j);
      for (double x : prediction.mass(j)) {
        out += ' ';
        out += format_double(x);
      }
      out += '\n';
    }
    return out;
  }

  static PredictionFile deserialize(const std::string& text) {
    PredictionFile pf;
    int goods = -1, grid_max = -1;
    std::vector<std::vector<double>> mass;
    std::size_t line_no = 0;
    for (const std::string& line : split(text, '\n')) {
      ++line_no;
      if (line.empty()) continue;
      if (line_no == 1) {
        if (line != "auctionlab-prediction v1") {
          throw ParseError("line 1: not an auctionlab prediction file");
        }
        continue;
      }
      const auto sp = line.find(' ');
      if (sp == std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) + ": expected 'key value'");
      }
      const std::string key = line.substr(0, sp);
      const std::string value = line.substr(sp + 1);
      try {
        if (key == "environment") {
          pf.environment_label = value;
        } else if (key == "statistic") {
          pf.statistic = value;
        } else if (key == "goods") {
          goods = static_cast<int>(parse_int(value));
        } else if (key == "grid_max") {
          grid_max = static_cast<int>(parse_int(value));
        } else if (key == "strategy") {
          pf.strategy = value;
        } else if (key == "iterations") {
          pf.iterations = parse_int(value);
        } else if (key == "games_per_iteration") {
          pf.games_per_iteration = parse_int(value);
        } else if (key == "final_ks_marg") {
          pf.final_ks_marg = parse_double(value);
        } else if (key == "config_hash") {
          pf.config_hash = value;
        } else if (key == "master_seed") {
          pf.master_seed = parse_uint(value);
        } else if (key == "mass") {
          const auto parts = split(value, ' ');
          if (parts.empty()) throw ParseError("empty mass line");
          const int j = static_cast<int>(parse_int(parts[0]));
          if (j != static_cast<int>(mass.size())) {
            throw ParseError("mass rows out of order");
          }
          std::vector<double> row;
          row.reserve(parts.size() - 1);
          for (std::size_t i = 1; i < parts.size(); ++i) row.push_back(parse_double(parts[i]));
          mass.push_back(std::move(row));
        } else {
          throw ParseError("unknown key '" + key + "'");
        }
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (goods < 1 || grid_max < 0) throw ParseError("missing goods/grid_max header");
    if (static_cast<int>(mass.size()) != goods) throw ParseError("expected one mass row per good");
    for (const auto& row : mass) {
      if (static_cast<int>(row.size()) != grid_max + 1) {
        throw ParseError("mass row length does not match grid_max");
      }
    }
    pf.prediction = PricePrediction::from_mass(std::move(mass));
    return pf;
  }

  void save(const std::string& path) const { write_file(path, serialize()); }

  static PredictionFile load(const std::string& path) {
    try {
      return deserialize(read_file(path));
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
};

}  // namespace auctionlab
