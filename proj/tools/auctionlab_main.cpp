// Command-line front end binding the library into reproducible experiments.
// Subcommands: valuation sample, scpp derive, scpp verify, simulate,
// egta regret, egta solve, oracle compare. Every output embeds the config
// hash and master seed; identical config + seed reruns are byte-identical
// regardless of worker count.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "auctionlab/config.hpp"
#include "auctionlab/egta.hpp"
#include "auctionlab/oracle.hpp"
#include "auctionlab/prediction_io.hpp"
#include "auctionlab/scpp.hpp"
#include "auctionlab/strategy_spec.hpp"
#include "auctionlab/textio.hpp"

namespace {

using namespace auctionlab;

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  }
  return out;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / file).string();
}

std::string provenance_comment(const ExperimentConfig& cfg) {
  return "# config_hash=" + cfg.config_hash + " master_seed=" + std::to_string(cfg.master_seed) +
         "\n";
}

int cmd_valuation_sample(const ExperimentConfig& cfg, int count, const std::string& out) {
  std::string csv = "# auctionlab valuations environment=" + cfg.environment.label() + "\n" +
                    provenance_comment(cfg);
  const bool scheduling = cfg.environment.family == ValuationFamily::Scheduling;
  csv += scheduling ? "sample,task_length" : "sample";
  for (int j = 1; j <= cfg.environment.num_goods; ++j) {
    csv += scheduling ? ",V" + std::to_string(j) : ",marginal" + std::to_string(j);
  }
  csv += "\n";
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(cfg.master_seed, 0x7A1ULL, static_cast<std::uint64_t>(i));
    csv += std::to_string(i);
    if (scheduling) {
      const auto sv = sample_scheduling_valuation(cfg.environment.num_goods, rng);
      csv += "," + std::to_string(sv.task_length);
      for (int v : sv.completion_values) csv += "," + std::to_string(v);
    } else {
      const auto hv = sample_homogeneous_valuation(cfg.environment.num_goods, rng);
      for (int v : hv.unit_marginals) csv += "," + std::to_string(v);
    }
    csv += "\n";
  }
  const std::string path = out.empty() ? out_path(cfg, "valuations.csv") : out;
  write_file(path, csv);
  std::cout << "wrote " << count << " " << cfg.environment.label() << " valuations to " << path
            << "\n";
  return 0;
}

int cmd_scpp_derive(const ExperimentConfig& cfg, const std::string& strategy_str) {
  const StrategySpec strategy = parse_strategy(strategy_str);
  const ScppConfig sc = cfg.scpp_config(strategy);
  const ScppResult res = derive_scpp(sc);

  PredictionFile pf;
  pf.prediction = res.prediction;
  pf.environment_label = cfg.environment.label();
  pf.statistic = statistic_name(sc.statistic);
  pf.strategy = format_strategy(strategy);
  pf.iterations = res.iterations_used;
  pf.games_per_iteration = sc.games_per_iteration;
  pf.final_ks_marg = res.final_ks_marg;
  pf.config_hash = cfg.config_hash;
  pf.master_seed = cfg.master_seed;

  const std::string base = sanitize(cfg.environment.label()) + "_" + sanitize(pf.strategy) + "_" +
                           pf.statistic;
  const std::string pred_path = out_path(cfg, "scpp_" + base + ".pred");
  pf.save(pred_path);

  std::string trace = "# auctionlab scpp trace strategy=" + pf.strategy + "\n" +
                      provenance_comment(cfg) + "iteration,ks_marg\n";
  for (std::size_t t = 0; t < res.ks_trace.size(); ++t) {
    trace += std::to_string(t + 1) + "," + format_double(res.ks_trace[t]) + "\n";
  }
  const std::string trace_path = out_path(cfg, "scpp_" + base + "_trace.csv");
  write_file(trace_path, trace);

  std::cout << (res.converged ? "converged" : "iteration cap reached") << " after "
            << res.iterations_used << " iterations, KS_marg=" << format_double(res.final_ks_marg)
            << "; wrote " << pred_path << "\n";
  return 0;
}

int cmd_scpp_verify(const ExperimentConfig& cfg, const std::string& prediction_path,
                    const std::string& strategy_str, int games) {
  const PredictionFile pf = PredictionFile::load(prediction_path);
  const std::string strategy_name = strategy_str.empty() ? pf.strategy : strategy_str;
  const StrategySpec strategy = parse_strategy(strategy_name);
  if (games <= 0) games = cfg.scpp_games;
  const double score =
      verify_self_confirming(strategy, pf.prediction, cfg.environment, games, cfg.scpp_statistic,
                             derive_seed(cfg.master_seed, 0xF5EEULL), cfg.scpp_all_viewpoints,
                             cfg.workers);
  std::cout << "self-confirmation score (KS_marg over " << games
            << " fresh games): " << format_double(score) << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& profile_str, int instances,
                 const std::string& out) {
  const Profile profile = Profile::parse(profile_str);
  StrategyRunner runner(cfg.environment, cfg.load_predictions());
  if (instances <= 0) instances = cfg.egta_instances;
  const std::uint64_t seed = derive_seed(cfg.master_seed, 0x516EULL);

  const std::string path = out.empty() ? out_path(cfg, "payoffs.csv") : out;
  EmpiricalGame game(cfg.environment.num_agents);
  if (std::filesystem::exists(path)) game = deserialize_payoffs(read_file(path));

  const auto payoffs = simulate_profile(runner, profile, instances, seed, cfg.workers);
  for (const auto& [strategy, entry] : payoffs) game.record(profile, strategy, entry);
  game.note_batch(profile, seed, instances);

  write_file(path, serialize_payoffs(game, {{"environment", cfg.environment.label()},
                                            {"config_hash", cfg.config_hash},
                                            {"master_seed", std::to_string(cfg.master_seed)}}));
  std::cout << "simulated " << instances << " instances of " << profile.to_string() << " into "
            << path << "\n";
  for (const auto& [strategy, entry] : payoffs) {
    std::cout << "  " << strategy << ": mean payoff " << format_double(entry.mean()) << "\n";
  }
  return 0;
}

int cmd_egta_regret(const std::string& payoffs_path, const std::string& profile_str) {
  const EmpiricalGame game = deserialize_payoffs(read_file(payoffs_path));
  const Profile profile = Profile::parse(profile_str);
  try {
    std::cout << "regret(" << profile.to_string() << ") = " << format_double(regret(game, profile))
              << "\n";
  } catch (const IncompleteGameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& p : e.missing_profiles) std::cerr << "  missing: " << p << "\n";
    return 1;
  }
  return 0;
}

int cmd_egta_solve(const ExperimentConfig& cfg, const std::string& payoffs_path,
                   const std::string& support_str, const std::string& out) {
  const EmpiricalGame game = deserialize_payoffs(read_file(payoffs_path));
  std::vector<std::vector<std::string>> supports;
  if (support_str.empty()) {
    // Every nonempty subset of the strategy set, smallest supports first.
    std::vector<std::string> all(game.strategies().begin(), game.strategies().end());
    const std::size_t k = all.size();
    if (k > 12) throw CapabilityError("support enumeration beyond 12 strategies; pass --support");
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      std::vector<std::string> support;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask & (std::size_t{1} << i)) support.push_back(all[i]);
      }
      supports.push_back(std::move(support));
    }
    std::sort(supports.begin(), supports.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
  } else {
    supports.push_back(split(support_str, '|'));
  }

  nlohmann::json result = nlohmann::json::array();
  Rng rng = make_rng(cfg.master_seed, 0x501EULL);
  for (const auto& support : supports) {
    std::vector<MixedProfile> candidates;
    try {
      candidates = replicator_solve(game, support, {}, rng);
    } catch (const IncompleteGameError&) {
      continue;  // support not fully simulated yet
    }
    for (const auto& mix : candidates) {
      double point_regret;
      try {
        point_regret = mixture_regret(game, mix);
      } catch (const IncompleteGameError&) {
        continue;  // deviations outside the support are missing
      }
      const double bound =
          bootstrap_regret_bound(game, mix, cfg.egta_resamples, cfg.egta_quantile, rng);
      nlohmann::json eq;
      for (const auto& [name, w] : mix.weights) {
        if (w > 1e-12) eq["mixture"][name] = w;
      }
      eq["regret"] = point_regret;
      eq["bootstrap_regret_bound"] = bound;
      eq["bootstrap_quantile"] = cfg.egta_quantile;
      eq["confirmed"] = point_regret <= 2.0 * bound + 1e-9;
      result.push_back(std::move(eq));
    }
  }
  nlohmann::json doc;
  doc["equilibria"] = result;
  doc["config_hash"] = cfg.config_hash;
  doc["master_seed"] = cfg.master_seed;
  const std::string text = doc.dump(2) + "\n";
  if (!out.empty()) write_file(out, text);
  std::cout << text;
  return 0;
}

int cmd_oracle_compare(const ExperimentConfig& cfg, const std::string& strategy_str,
                       const std::string& prediction_path, int trials, double grid_step,
                       const std::string& out) {
  const StrategySpec strategy = parse_strategy(strategy_str);
  PricePrediction pi =
      prediction_path.empty()
          ? PricePrediction::uniform(cfg.environment.num_goods, cfg.environment.price_grid_max)
          : PredictionFile::load(prediction_path).prediction;
  if (trials <= 0) trials = cfg.oracle_trials;
  if (grid_step <= 0.0) grid_step = cfg.oracle_grid_step;

  const Environment env = cfg.environment;
  const auto summary = optimality_ratio(
      [&](const Valuation& v, Rng& rng) { return compute_bid(strategy, v, pi, rng); },
      [&](Rng& rng) { return env.sample_valuation(rng); }, pi, trials, grid_step,
      derive_seed(cfg.master_seed, 0x0AC1ULL), cfg.workers);

  std::string csv = "# auctionlab oracle compare strategy=" + format_strategy(strategy) +
                    " grid_step=" + format_double(grid_step) + "\n" + provenance_comment(cfg) +
                    "trial,strategy_eu,optimal_eu\n";
  for (std::size_t t = 0; t < summary.trials.size(); ++t) {
    csv += std::to_string(t) + "," + format_double(summary.trials[t].strategy_eu) + "," +
           format_double(summary.trials[t].optimal_eu) + "\n";
  }
  const std::string path = out.empty() ? out_path(cfg, "oracle_compare.csv") : out;
  write_file(path, csv);
  std::cout << "ratio of means " << format_double(summary.ratio) << " over " << trials
            << " trials; wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simultaneous second-price sealed-bid auction laboratory: self-confirming price\n"
      "predictions, prediction-based bidding strategies, and empirical game analysis.\n"
      "\n"
      "Strategy spec grammar:\n"
      "  StraightMV | StraightMU<k> | AverageMU<k> | BidEval | BidEvalMix | LocalBid\n"
      "  with optional (key=value,...) parameters: init=/gen= nested spec,\n"
      "  K= sweeps, Ns= optimization samples (0 = exact), C= candidates,\n"
      "  Ne= evaluation samples (0 = exact), k= point samples (0 = exact),\n"
      "  update=mean|exact, pred=scpp:KEY | point:p1;p2;... | uniform,\n"
      "  and a trailing _HB or _price statistic tag, e.g.\n"
      "  LocalBid(init=StraightMU8,K=10,Ns=64,pred=scpp:U33_HB)"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();

  int workers = -1;
  app.add_option("--workers", workers, "worker threads (default: config, then all cores)");

  // valuation sample
  auto* valuation = app.add_subcommand("valuation", "valuation distribution utilities");
  valuation->require_subcommand(1);
  auto* vsample = valuation->add_subcommand("sample", "sample valuations to CSV");
  int vcount = 10;
  std::string vout;
  vsample->add_option("--count", vcount, "number of valuations");
  vsample->add_option("--out", vout, "output CSV path");

  // scpp derive / verify
  auto* scpp = app.add_subcommand("scpp", "self-confirming price predictions");
  scpp->require_subcommand(1);
  auto* derive = scpp->add_subcommand("derive", "derive a prediction for a strategy");
  std::string derive_strategy;
  derive->add_option("--strategy", derive_strategy, "strategy spec")->required();
  auto* verify = scpp->add_subcommand("verify", "independent self-confirmation replay");
  std::string verify_prediction, verify_strategy;
  int verify_games = 0;
  verify->add_option("--prediction", verify_prediction, "prediction file")->required();
  verify->add_option("--strategy", verify_strategy, "strategy spec (default: from file)");
  verify->add_option("--games", verify_games, "replay instance count");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "simulate a strategy profile");
  std::string sim_profile, sim_out;
  int sim_instances = 0;
  simulate->add_option("--profile", sim_profile, "profile, e.g. \"SpecA:2|SpecB:1\"")->required();
  simulate->add_option("--instances", sim_instances, "instances (default: config)");
  simulate->add_option("--out", sim_out, "payoff CSV (merged if it exists)");

  // egta regret / solve
  auto* egta = app.add_subcommand("egta", "empirical game analysis");
  egta->require_subcommand(1);
  auto* regret_cmd = egta->add_subcommand("regret", "regret of a pure profile");
  std::string regret_payoffs, regret_profile;
  regret_cmd->add_option("--payoffs", regret_payoffs, "payoff CSV")->required();
  regret_cmd->add_option("--profile", regret_profile, "profile string")->required();
  auto* solve = egta->add_subcommand("solve", "find and confirm symmetric mixed equilibria");
  std::string solve_payoffs, solve_support, solve_out;
  solve->add_option("--payoffs", solve_payoffs, "payoff CSV")->required();
  solve->add_option("--support", solve_support, "restrict to support \"SpecA|SpecB\"");
  solve->add_option("--out", solve_out, "equilibria JSON path");

  // oracle compare
  auto* oracle = app.add_subcommand("oracle", "exact expected-utility oracle");
  oracle->require_subcommand(1);
  auto* compare = oracle->add_subcommand("compare", "strategy EU vs grid-optimal EU");
  std::string cmp_strategy, cmp_prediction, cmp_out;
  int cmp_trials = 0;
  double cmp_step = 0.0;
  compare->add_option("--strategy", cmp_strategy, "strategy spec")->required();
  compare->add_option("--prediction", cmp_prediction, "prediction file (default: uniform)");
  compare->add_option("--trials", cmp_trials, "valuation draws (default: config)");
  compare->add_option("--grid-step", cmp_step, "bid grid step (default: config)");
  compare->add_option("--out", cmp_out, "per-trial CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (workers >= 0) cfg.workers = workers;
    if (vsample->parsed()) return cmd_valuation_sample(cfg, vcount, vout);
    if (derive->parsed()) return cmd_scpp_derive(cfg, derive_strategy);
    if (verify->parsed()) return cmd_scpp_verify(cfg, verify_prediction, verify_strategy, verify_games);
    if (simulate->parsed()) return cmd_simulate(cfg, sim_profile, sim_instances, sim_out);
    if (regret_cmd->parsed()) return cmd_egta_regret(regret_payoffs, regret_profile);
    if (solve->parsed()) return cmd_egta_solve(cfg, solve_payoffs, solve_support, solve_out);
    if (compare->parsed()) return cmd_oracle_compare(cfg, cmp_strategy, cmp_prediction, cmp_trials,
                                                     cmp_step, cmp_out);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
