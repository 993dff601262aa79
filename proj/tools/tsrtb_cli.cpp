// Command-line front end: simulate datasets, fit trade-off weights, and
// produce cross-validation, sweep, dominance and correlation reports.
//
// Exit status: 0 on success (a declared infeasible optimum included),
// 2 on configuration or validation errors, 1 on anything else.

#include "tsrtb/error.hpp"
#include "tsrtb/evaluation.hpp"
#include "tsrtb/serialize.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tsrtb;

namespace {

constexpr int kExitConfig   = 2;
constexpr int kExitInternal = 1;

/// Raw flag values; unset options fall back to the config file, then defaults.
struct Flags
{
  std::optional<std::string>   config;
  std::optional<std::uint64_t> seed;
  std::optional<double>        theta1;
  std::optional<std::string>   theta;
  std::optional<double>        grid_step;
  std::optional<std::size_t>   folds;
  std::optional<std::string>   out;
  std::optional<std::string>   data;
  std::optional<std::string>   sweep;
  std::optional<std::string>   weights;
  std::optional<std::string>   result;
  std::optional<std::string>   auction_id;
  // simulate
  std::optional<std::size_t> impressions;
  std::optional<std::size_t> bidders_min;
  std::optional<std::size_t> bidders_max;
  std::optional<std::size_t> ad_pool;
  std::optional<double>      bid_log_mean;
  std::optional<double>      bid_log_sigma;
  std::optional<double>      bid_tick;
  std::optional<double>      value_markup;
  std::optional<std::string> auctions;
  std::optional<std::string> metrics;
};

/// Resolved settings for one run, echoed into every output.
class RunConfig
{
public:
  RunConfig(std::string subcommand, Flags const &flags)
    : subcommand_(std::move(subcommand))
    , flags_(flags)
  {
    if (flags.config)
    {
      if (!fs::exists(*flags.config))
      {
        throw ConfigError("config file not found: " + *flags.config);
      }
      std::ifstream in(*flags.config);
      try
      {
        file_ = Json::parse(in);
      }
      catch (nlohmann::json::exception const &e)
      {
        throw ConfigError(*flags.config + ": " + e.what());
      }
      if (!file_.is_object())
      {
        throw ConfigError(*flags.config + ": config must be a JSON object");
      }
    }
    resolved_["subcommand"] = subcommand_;
  }

  template <typename T>
  std::optional<T> get(std::optional<T> const &flag, char const *key)
  {
    std::optional<T> value = flag;
    if (!value && file_.contains(key))
    {
      try
      {
        value = file_[key].get<T>();
      }
      catch (nlohmann::json::exception const &)
      {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
      }
    }
    if (value)
    {
      resolved_[key] = *value;
    }
    return value;
  }

  template <typename T>
  T get(std::optional<T> const &flag, char const *key, T fallback)
  {
    auto value = get(flag, key);
    if (!value)
    {
      resolved_[key] = fallback;
    }
    return value.value_or(fallback);
  }

  std::uint64_t seed()
  {
    auto s = get(flags_.seed, "seed");
    if (!s)
    {
      throw ConfigError(subcommand_ + ": --seed is required");
    }
    return *s;
  }

  fs::path out_dir()
  {
    fs::path dir = get(flags_.out, "out", std::string("."));
    fs::create_directories(dir);
    return dir;
  }

  fs::path input(std::optional<std::string> const &flag, char const *key, char const *option)
  {
    auto path = get(flag, key);
    if (!path)
    {
      throw ConfigError(subcommand_ + ": " + option + " is required");
    }
    if (!fs::exists(*path))
    {
      throw ConfigError("input file not found: " + *path);
    }
    return *path;
  }

  TradeoffConfig tradeoff()
  {
    TradeoffConfig c;
    if (auto theta = get(flags_.theta, "theta_list"))
    {
      auto const values = parse_list(*theta, "--theta");
      if (values.size() != kMetricCount)
      {
        throw ConfigError("--theta needs six comma-separated values");
      }
      std::copy(values.begin(), values.end(), c.theta.begin());
    }
    else if (file_.contains("theta"))
    {
      c.theta = tradeoff_config_from_json(Json{{"theta", file_["theta"]}}).theta;
    }
    if (auto t1 = get(flags_.theta1, "theta1"))
    {
      c.theta[0] = *t1;
    }
    c.grid_step = get(flags_.grid_step, "grid_step", 0.05);
    c.validate();
    resolved_["tradeoff"] = to_json(c);
    return c;
  }

  static std::vector<double> parse_list(std::string const &text, std::string const &what)
  {
    std::vector<double> out;
    std::stringstream   ss(text);
    std::string         item;
    while (std::getline(ss, item, ','))
    {
      try
      {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos)
        {
          throw std::invalid_argument(item);
        }
      }
      catch (std::exception const &)
      {
        throw ConfigError(what + ": cannot parse '" + item + "' as a number");
      }
    }
    return out;
  }

  Flags const &flags() const { return flags_; }
  Json const  &echo() const { return resolved_; }

  void write_run_record(fs::path const &dir) const { write_json(dir / "run.json", resolved_); }

private:
  std::string subcommand_;
  Flags       flags_;
  Json        file_ = Json::object();
  Json        resolved_;
};

std::vector<SimulatedImpression> load_data(RunConfig &run)
{
  return read_impressions(run.input(run.flags().data, "data", "--data"));
}

void warn(std::string const &message)
{
  std::cerr << "warning: " << message << '\n';
}

int cmd_simulate(RunConfig &run)
{
  auto const seed = run.seed();
  auto const out  = run.out_dir();

  std::vector<SimulatedImpression> impressions;
  auto const                       auctions_path = run.get(run.flags().auctions, "auctions");
  auto const                       metrics_path  = run.get(run.flags().metrics, "metrics");
  if (auctions_path || metrics_path)
  {
    auto const a = run.input(run.flags().auctions, "auctions", "--auctions");
    auto const m = run.input(run.flags().metrics, "metrics", "--metrics");
    std::vector<std::string> warnings;
    auto const               auctions = ingest_auctions(a, &warnings);
    auto const               metrics  = ingest_metrics(m, &warnings);
    for (auto const &w : warnings)
    {
      warn(w);
    }
    impressions = simulate_from_sources(auctions, metrics, CtrModel{}, seed);
  }
  else
  {
    SynthesisSpec spec;
    spec.impressions   = run.get(run.flags().impressions, "impressions", std::size_t{1000});
    spec.bidders_min   = run.get(run.flags().bidders_min, "bidders_min", spec.bidders_min);
    spec.bidders_max   = run.get(run.flags().bidders_max, "bidders_max", spec.bidders_max);
    spec.ad_pool       = run.get(run.flags().ad_pool, "ad_pool", spec.ad_pool);
    spec.bid_log_mean  = run.get(run.flags().bid_log_mean, "bid_log_mean", spec.bid_log_mean);
    spec.bid_log_sigma = run.get(run.flags().bid_log_sigma, "bid_log_sigma", spec.bid_log_sigma);
    spec.bid_tick      = run.get(run.flags().bid_tick, "bid_tick", spec.bid_tick);
    spec.value_markup  = run.get(run.flags().value_markup, "value_markup", spec.value_markup);
    impressions        = synthesize_dataset(spec, seed);
  }
  if (impressions.empty())
  {
    warn("dataset is empty");
  }

  write_dataset(out, impressions);
  run.write_run_record(out);
  std::cout << "wrote " << impressions.size() << " impressions to " << out.string() << '\n';
  return 0;
}

int cmd_optimize(RunConfig &run)
{
  auto const config      = run.tradeoff();
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);
  if (impressions.empty())
  {
    throw ConfigError("optimize: dataset is empty");
  }

  auto const normalized = normalize_all(raw_matrices(impressions));
  auto const result     = optimize(normalized, config);

  Json doc      = to_json(result);
  doc["config"] = run.echo();
  write_json(out / "optimization.json", doc);

  if (result.infeasible)
  {
    std::cout << "infeasible: no grid point satisfies the thresholds\n";
  }
  else
  {
    std::cout << "weights " << to_json(*result.weights).dump() << " objective " << result.objective << '\n';
  }
  return 0;
}

int cmd_rerank(RunConfig &run)
{
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);

  WeightVector weights;
  if (auto w = run.get(run.flags().weights, "weights_list"))
  {
    auto const values = RunConfig::parse_list(*w, "--weights");
    if (values.size() != kMetricCount)
    {
      throw ConfigError("--weights needs six comma-separated values");
    }
    MetricVector v{};
    std::copy(values.begin(), values.end(), v.begin());
    weights = WeightVector(v);
  }
  else if (auto r = run.get(run.flags().result, "result"))
  {
    if (!fs::exists(*r))
    {
      throw ConfigError("input file not found: " + *r);
    }
    std::ifstream in(*r);
    auto const    doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("weights") || doc["weights"].is_null())
    {
      throw ConfigError(*r + ": no weights in optimization result");
    }
    weights = weights_from_json(doc["weights"]);
  }
  else
  {
    throw ConfigError("rerank: --weights or --result is required");
  }

  if (impressions.empty())
  {
    throw ConfigError("rerank: dataset is empty");
  }
  auto const normalized = normalize_all(raw_matrices(impressions));

  std::vector<RerankOutcome> outcomes;
  std::vector<Json>          lines;
  for (auto const &m : normalized)
  {
    outcomes.push_back(select(weights, m));
    lines.push_back(to_json(outcomes.back()));
  }
  write_jsonl(out / "rerank.jsonl", lines);

  Json summary;
  summary["weights"] = to_json(weights);
  summary["xi"]      = to_json(changes(outcomes));
  summary["changed"] = std::count_if(outcomes.begin(), outcomes.end(), [](auto const &o) { return o.changed(); });
  summary["auctions"] = outcomes.size();
  summary["config"]   = run.echo();
  write_json(out / "rerank_summary.json", summary);
  std::cout << "re-ranked " << outcomes.size() << " auctions\n";
  return 0;
}

std::vector<double> sweep_values(RunConfig &run)
{
  auto text = run.get(run.flags().sweep, "sweep",
                      std::string("0,-0.05,-0.1,-0.15,-0.2,-0.25,-0.3,-0.35,-0.4,-0.45,-0.5"));
  return RunConfig::parse_list(text, "--sweep");
}

void write_sweep(fs::path const &out, std::vector<SweepPoint> const &sweep)
{
  std::vector<Json> lines;
  for (auto const &p : sweep)
  {
    lines.push_back(to_json(p));
  }
  write_jsonl(out / "sweep.jsonl", lines);
  write_text(out / "sweep.csv", sweep_csv(sweep));
}

int cmd_evaluate(RunConfig &run)
{
  auto const config      = run.tradeoff();
  auto const seed        = run.seed();
  auto const k           = run.get(run.flags().folds, "folds", std::size_t{10});
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);

  auto const report = cross_validate(impressions, config, k, seed);

  std::vector<Json> lines;
  for (auto const &f : report.folds)
  {
    lines.push_back(to_json(f));
  }
  write_jsonl(out / "folds.jsonl", lines);
  write_text(out / "folds.csv", folds_csv(report.folds, report.summary));

  Json summary       = to_json(report.summary);
  summary["config"]  = run.echo();
  write_json(out / "summary.json", summary);

  if (run.get(run.flags().sweep, "sweep"))
  {
    write_sweep(out, sweep_theta1(impressions, config, sweep_values(run), k, seed));
  }

  Json corr      = to_json(correlation_report(impressions));
  corr["config"] = run.echo();
  write_json(out / "correlation.json", corr);
  run.write_run_record(out);

  for (auto const &f : report.folds)
  {
    if (f.test_violates_theta)
    {
      warn("fold " + std::to_string(f.fold + 1) + ": test changes fall outside the thresholds");
    }
  }
  std::cout << report.folds.size() << " folds, " << report.summary.infeasible_folds.size() << " infeasible\n";
  return 0;
}

int cmd_sweep(RunConfig &run)
{
  auto const config      = run.tradeoff();
  auto const seed        = run.seed();
  auto const k           = run.get(run.flags().folds, "folds", std::size_t{10});
  auto const values      = sweep_values(run);
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);

  auto const sweep = sweep_theta1(impressions, config, values, k, seed);
  write_sweep(out, sweep);
  run.write_run_record(out);
  std::cout << sweep.size() << " sweep points\n";
  return 0;
}

int cmd_dominance(RunConfig &run)
{
  auto const config      = run.tradeoff();
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);
  if (impressions.empty())
  {
    throw ConfigError("dominance: dataset is empty");
  }
  auto const normalized = normalize_all(raw_matrices(impressions));

  auto const   wanted = run.get(run.flags().auction_id, "auction_id");
  auto const  *matrix = &normalized.front();
  if (wanted)
  {
    auto it = std::find_if(normalized.begin(), normalized.end(),
                           [&](MetricMatrix const &m) { return m.auction_id == *wanted; });
    if (it == normalized.end())
    {
      throw ConfigError("dominance: no auction '" + *wanted + "' in the dataset");
    }
    matrix = &*it;
  }

  auto const        grid    = enumerate_simplex(config.grid_step);
  auto const        entries = dominance_report(*matrix, grid);
  std::vector<Json> lines;
  for (auto const &e : entries)
  {
    Json j          = to_json(e, grid);
    j["auction_id"] = matrix->auction_id;
    lines.push_back(std::move(j));
  }
  write_jsonl(out / "dominance.jsonl", lines);
  run.write_run_record(out);
  std::cout << "classified " << entries.size() << " candidates of auction " << matrix->auction_id << '\n';
  return 0;
}

int cmd_correlate(RunConfig &run)
{
  auto const out         = run.out_dir();
  auto const impressions = load_data(run);
  Json       doc         = to_json(correlation_report(impressions));
  doc["config"]          = run.echo();
  write_json(out / "correlation.json", doc);
  std::cout << "correlation over " << impressions.size() << " impressions\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Two-stage real-time bidding: auctions, re-ranking and trade-off weights"};
  app.require_subcommand(1);

  Flags flags;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", flags.config, "JSON config file; flags override it");
    sub->add_option("--out", flags.out, "Output directory");
  };
  auto data = [&](CLI::App *sub) { sub->add_option("--data", flags.data, "impressions.jsonl to read"); };
  auto tradeoff = [&](CLI::App *sub) {
    sub->add_option("--theta1", flags.theta1, "Revenue loss cap, in [-1, 0]");
    sub->add_option("--theta", flags.theta, "All six thresholds, comma-separated");
    sub->add_option("--grid-step", flags.grid_step, "Weight grid step; must divide 1");
  };
  auto seeded = [&](CLI::App *sub) { sub->add_option("--seed", flags.seed, "Master random seed"); };
  auto folds  = [&](CLI::App *sub) { sub->add_option("--folds", flags.folds, "Cross-validation fold count"); };

  auto *simulate = app.add_subcommand("simulate", "Build a dataset from logs or synthetically");
  common(simulate);
  seeded(simulate);
  simulate->add_option("--impressions", flags.impressions, "Synthetic impression count");
  simulate->add_option("--bidders-min", flags.bidders_min, "Fewest bidders per auction");
  simulate->add_option("--bidders-max", flags.bidders_max, "Most bidders per auction");
  simulate->add_option("--ad-pool", flags.ad_pool, "Number of distinct synthetic ads");
  simulate->add_option("--bid-log-mean", flags.bid_log_mean, "Mean of log bids");
  simulate->add_option("--bid-log-sigma", flags.bid_log_sigma, "Standard deviation of log bids");
  simulate->add_option("--bid-tick", flags.bid_tick, "Round bids up to this price tick");
  simulate->add_option("--value-markup", flags.value_markup, "Bid shading: value = bid * (1 + U(0, m))");
  simulate->add_option("--auctions", flags.auctions, "auctions.jsonl to sample from");
  simulate->add_option("--metrics", flags.metrics, "metrics.jsonl with per-webpage ad scores");

  auto *optimize_cmd = app.add_subcommand("optimize", "Fit trade-off weights on a dataset");
  common(optimize_cmd);
  data(optimize_cmd);
  tradeoff(optimize_cmd);

  auto *rerank = app.add_subcommand("rerank", "Re-rank every auction under fixed weights");
  common(rerank);
  data(rerank);
  rerank->add_option("--weights", flags.weights, "Six comma-separated weights");
  rerank->add_option("--result", flags.result, "optimization.json to take weights from");

  auto *evaluate = app.add_subcommand("evaluate", "Cross-validate and report");
  common(evaluate);
  data(evaluate);
  tradeoff(evaluate);
  seeded(evaluate);
  folds(evaluate);
  evaluate->add_option("--sweep", flags.sweep, "Also sweep these theta1 values");

  auto *sweep = app.add_subcommand("sweep", "Cross-validate across revenue caps");
  common(sweep);
  data(sweep);
  tradeoff(sweep);
  seeded(sweep);
  folds(sweep);
  sweep->add_option("--sweep", flags.sweep, "Comma-separated theta1 values");

  auto *dominance = app.add_subcommand("dominance", "Classify one auction's candidates");
  common(dominance);
  data(dominance);
  tradeoff(dominance);
  dominance->add_option("--auction-id", flags.auction_id, "Auction to analyse (default: first)");

  auto *correlate = app.add_subcommand("correlate", "Pairwise correlation of ground-truth metrics");
  common(correlate);
  data(correlate);

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return kExitConfig;
  }

  try
  {
    auto *sub = app.get_subcommands().front();
    RunConfig run(sub->get_name(), flags);
    if (sub == simulate)
      return cmd_simulate(run);
    if (sub == optimize_cmd)
      return cmd_optimize(run);
    if (sub == rerank)
      return cmd_rerank(run);
    if (sub == evaluate)
      return cmd_evaluate(run);
    if (sub == sweep)
      return cmd_sweep(run);
    if (sub == dominance)
      return cmd_dominance(run);
    return cmd_correlate(run);
  }
  catch (tsrtb::Error const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (std::exception const &e)
  {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
