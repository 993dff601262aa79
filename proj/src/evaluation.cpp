#include "tsrtb/evaluation.hpp"

#include "tsrtb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsrtb {

std::vector<MetricMatrix> raw_matrices(std::span<SimulatedImpression const> impressions)
{
  std::vector<MetricMatrix> out;
  out.reserve(impressions.size());
  for (auto const &imp : impressions)
  {
    auto const allocation = run_auction(imp.auction);
    out.push_back(assemble_raw(imp.auction, allocation, imp.scores));
  }
  return out;
}

std::vector<MetricMatrix> normalize_all(std::span<MetricMatrix const> raw)
{
  auto const                normalizer = fit_normalizer(raw);
  std::vector<MetricMatrix> out;
  out.reserve(raw.size());
  for (auto const &m : raw)
  {
    out.push_back(apply_normalizer(normalizer, m));
  }
  return out;
}

std::vector<std::size_t> assign_folds(std::size_t count, std::size_t k, std::uint64_t seed)
{
  if (k < 2)
  {
    throw ConfigError("fold count must be at least 2");
  }
  if (count < k)
  {
    throw ConfigError("need at least " + std::to_string(k) + " impressions for " + std::to_string(k) +
                      " folds, got " + std::to_string(count));
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(seed, 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> fold(count);
  for (std::size_t i = 0; i < count; ++i)
  {
    fold[order[i]] = i % k;
  }
  return fold;
}

namespace {

std::pair<std::optional<double>, std::optional<double>> mean_std(std::vector<double> const &xs)
{
  if (xs.empty())
  {
    return {};
  }
  double const mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2)
  {
    return {mean, std::nullopt};
  }
  double ss = 0.0;
  for (auto x : xs)
  {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

ColumnStats column_stats(std::span<FoldReport const> folds, ChangeVector FoldReport::*which)
{
  ColumnStats stats;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    std::vector<double> xs;
    for (auto const &f : folds)
    {
      if (!f.infeasible && (f.*which)[k])
      {
        xs.push_back(*(f.*which)[k]);
      }
    }
    std::tie(stats.mean[k], stats.std[k]) = mean_std(xs);
  }
  return stats;
}

/// Everything about one fold that does not depend on the revenue cap.
struct FoldContext
{
  std::size_t                 train_size = 0;
  std::vector<MetricMatrix>   test;
  std::vector<GridEvaluation> grid_evals;
};

FoldContext prepare_fold(std::span<MetricMatrix const> raw, std::span<std::size_t const> fold_of,
                         std::size_t fold, std::span<WeightVector const> grid)
{
  std::vector<MetricMatrix> train_raw;
  std::vector<MetricMatrix> test_raw;
  for (std::size_t i = 0; i < raw.size(); ++i)
  {
    (fold_of[i] == fold ? test_raw : train_raw).push_back(raw[i]);
  }

  auto const normalizer = fit_normalizer(train_raw);
  for (auto &m : train_raw)
  {
    m = apply_normalizer(normalizer, std::move(m));
  }
  for (auto &m : test_raw)
  {
    m = apply_normalizer(normalizer, std::move(m));
  }

  FoldContext ctx;
  ctx.train_size = train_raw.size();
  ctx.grid_evals = evaluate_grid(ScoringTable(train_raw), grid);
  ctx.test       = std::move(test_raw);
  return ctx;
}

FoldReport report_fold(FoldContext const &ctx, std::size_t fold, std::span<WeightVector const> grid,
                       MetricVector const &theta)
{
  FoldReport report;
  report.fold       = fold;
  report.train_size = ctx.train_size;
  report.test_size  = ctx.test.size();

  auto const best       = pick_optimum(grid, ctx.grid_evals, theta);
  report.infeasible     = best.infeasible;
  report.feasible_count = best.feasible_count;
  if (best.infeasible)
  {
    return report;
  }
  report.weights         = best.weights;
  report.train_changes   = best.train_changes;
  report.train_objective = best.objective;

  std::vector<RerankOutcome> outcomes;
  outcomes.reserve(ctx.test.size());
  double objective = 0.0;
  for (auto const &m : ctx.test)
  {
    outcomes.push_back(select(*best.weights, m));
    objective += outcomes.back().selected_score;
  }
  report.test_objective      = objective;
  report.test_changes        = changes(outcomes);
  report.test_violates_theta = !satisfies(report.test_changes, theta);
  return report;
}

}  // namespace

FoldSummary summarize(std::span<FoldReport const> folds)
{
  FoldSummary summary;
  summary.train = column_stats(folds, &FoldReport::train_changes);
  summary.test  = column_stats(folds, &FoldReport::test_changes);

  std::vector<double> train_obj;
  std::vector<double> test_obj;
  for (auto const &f : folds)
  {
    if (f.infeasible)
    {
      summary.infeasible_folds.push_back(f.fold);
      continue;
    }
    train_obj.push_back(f.train_objective);
    test_obj.push_back(f.test_objective);
  }
  summary.mean_train_objective = mean_std(train_obj).first;
  summary.mean_test_objective  = mean_std(test_obj).first;
  return summary;
}

std::vector<SweepPoint> sweep_theta1(std::span<SimulatedImpression const> impressions, TradeoffConfig const &config,
                                     std::span<double const> theta1_values, std::size_t k, std::uint64_t seed)
{
  std::vector<double> caps(theta1_values.begin(), theta1_values.end());
  std::sort(caps.begin(), caps.end(), std::greater<>());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
  if (caps.empty())
  {
    throw ConfigError("theta1 sweep needs at least one value");
  }

  std::vector<SweepPoint> points(caps.size());
  for (std::size_t p = 0; p < caps.size(); ++p)
  {
    auto c     = config;
    c.theta[0] = caps[p];
    c.validate();
    points[p].theta1 = caps[p];
  }

  auto const fold_of = assign_folds(impressions.size(), k, seed);
  auto const raw     = raw_matrices(impressions);
  auto const grid    = enumerate_simplex(config.grid_step);

  for (std::size_t fold = 0; fold < k; ++fold)
  {
    auto const ctx = prepare_fold(raw, fold_of, fold, grid);
    for (auto &point : points)
    {
      auto theta = config.theta;
      theta[0]   = point.theta1;
      point.folds.push_back(report_fold(ctx, fold, grid, theta));
    }
  }

  for (auto &point : points)
  {
    point.summary          = summarize(point.folds);
    point.infeasible_count = point.summary.infeasible_folds.size();
  }
  return points;
}

CrossValidationReport cross_validate(std::span<SimulatedImpression const> impressions, TradeoffConfig const &config,
                                     std::size_t k, std::uint64_t seed)
{
  config.validate();
  double const theta1 = config.theta[0];
  auto         sweep  = sweep_theta1(impressions, config, std::span<double const>(&theta1, 1), k, seed);

  CrossValidationReport report;
  report.config  = config;
  report.k       = k;
  report.seed    = seed;
  report.folds   = std::move(sweep.front().folds);
  report.summary = std::move(sweep.front().summary);
  return report;
}

CorrelationReport correlation_report(std::span<SimulatedImpression const> impressions)
{
  if (impressions.size() < 2)
  {
    throw InvalidAuction("correlation report needs at least two impressions");
  }
  auto const raw = raw_matrices(impressions);
  auto const n   = static_cast<double>(raw.size());

  MetricVector mean{};
  for (auto const &m : raw)
  {
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      mean[k] += m.ground_truth().raw[k];
    }
  }
  for (auto &x : mean)
  {
    x /= n;
  }

  std::array<MetricVector, kMetricCount> cov{};
  for (auto const &m : raw)
  {
    auto const &x = m.ground_truth().raw;
    for (std::size_t a = 0; a < kMetricCount; ++a)
    {
      for (std::size_t b = 0; b < kMetricCount; ++b)
      {
        cov[a][b] += (x[a] - mean[a]) * (x[b] - mean[b]);
      }
    }
  }

  CorrelationReport report;
  report.samples = raw.size();
  for (std::size_t a = 0; a < kMetricCount; ++a)
  {
    for (std::size_t b = 0; b < kMetricCount; ++b)
    {
      if (cov[a][a] > 0.0 && cov[b][b] > 0.0)
      {
        double const r = cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]);
        report.r[a][b] = a == b ? 1.0 : std::clamp(r, -1.0, 1.0);
      }
    }
  }
  return report;
}

}  // namespace tsrtb
