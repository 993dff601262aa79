#include "tsrtb/optimizer.hpp"

#include "tsrtb/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace tsrtb {

void TradeoffConfig::validate() const
{
  if (!(theta[0] >= -1.0 && theta[0] <= 0.0))
  {
    throw ConfigError("theta1 = " + std::to_string(theta[0]) + " outside [-1, 0]");
  }
  for (std::size_t k = 1; k < kMetricCount; ++k)
  {
    if (!(theta[k] >= 0.0) || !std::isfinite(theta[k]))
    {
      throw ConfigError("theta" + std::to_string(k + 1) + " = " + std::to_string(theta[k]) +
                        " must be >= 0");
    }
  }
  simplex_divisions(grid_step);
}

TradeoffConfig TradeoffConfig::revenue_cap(double theta1, double grid_step)
{
  TradeoffConfig config;
  config.theta[0]  = theta1;
  config.grid_step = grid_step;
  return config;
}

bool ChangeVector::all_defined() const
{
  return std::all_of(xi.begin(), xi.end(), [](auto const &x) { return x.has_value(); });
}

namespace {

ChangeVector ratio(MetricVector const &diff_sum, MetricVector const &truth_sum)
{
  ChangeVector out;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    if (truth_sum[k] != 0.0)
    {
      out.xi[k] = diff_sum[k] / truth_sum[k];
    }
  }
  return out;
}

}  // namespace

ChangeVector changes(std::span<RerankOutcome const> outcomes)
{
  if (outcomes.empty())
  {
    throw InvalidAuction("change vector needs at least one outcome");
  }
  MetricVector diff{};
  MetricVector truth{};
  for (auto const &o : outcomes)
  {
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      diff[k] += o.selected_x[k] - o.ground_truth_x[k];
      truth[k] += o.ground_truth_x[k];
    }
  }
  return ratio(diff, truth);
}

bool satisfies(ChangeVector const &changes, MetricVector const &theta)
{
  auto const revenue = changes[0];
  if (!revenue || std::abs(*revenue) > std::abs(theta[0]))
  {
    return false;
  }
  for (std::size_t k = 1; k < kMetricCount; ++k)
  {
    if (!changes[k] || *changes[k] < theta[k])
    {
      return false;
    }
  }
  return true;
}

std::size_t simplex_divisions(double step)
{
  if (!(step > 0.0 && step <= 1.0))
  {
    throw ConfigError("grid step " + std::to_string(step) + " must be in (0, 1]");
  }
  double const n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9)
  {
    throw ConfigError("grid step " + std::to_string(step) + " does not divide 1");
  }
  return static_cast<std::size_t>(n);
}

std::vector<WeightVector> enumerate_simplex(double step)
{
  auto const divisions = simplex_divisions(step);

  std::vector<WeightVector>               grid;
  std::array<std::size_t, kMetricCount>   counts{};
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t k, std::size_t left) {
    if (k + 1 == kMetricCount)
    {
      counts[k] = left;
      MetricVector w{};
      for (std::size_t i = 0; i < kMetricCount; ++i)
      {
        w[i] = static_cast<double>(counts[i]) / static_cast<double>(divisions);
      }
      grid.emplace_back(w);
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;)
    {
      counts[k] = c;
      fill(k + 1, left - c);
    }
  };
  fill(0, divisions);
  return grid;
}

ChangeVector GridEvaluation::changes() const
{
  return ratio(diff_sum, truth_sum);
}

ScoringTable::ScoringTable(std::span<MetricMatrix const> normalized)
{
  offsets_.reserve(normalized.size() + 1);
  truth_.reserve(normalized.size());
  offsets_.push_back(0);

  for (auto const &matrix : normalized)
  {
    if (matrix.rows.empty())
    {
      throw InvalidAuction("auction '" + matrix.auction_id + "': no candidates to re-rank");
    }
    for (auto i : selection_priority(matrix))
    {
      auto const &x         = matrix.rows[i].normalized;
      bool        dominated = false;
      for (auto const &other : matrix.rows)
      {
        if (strictly_dominates(other.normalized, x))
        {
          dominated = true;
          break;
        }
      }
      if (!dominated)
      {
        candidates_.push_back(x);
      }
    }
    offsets_.push_back(candidates_.size());
    truth_.push_back(matrix.ground_truth().normalized);
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      truth_sum_[k] += truth_.back()[k];
    }
  }
}

GridEvaluation ScoringTable::evaluate(WeightVector const &weights) const
{
  GridEvaluation result;
  result.truth_sum = truth_sum_;

  for (std::size_t z = 0; z < truth_.size(); ++z)
  {
    auto const   first = offsets_[z];
    auto const   last  = offsets_[z + 1];
    std::size_t  best  = first;
    double       score = rank_score(weights, candidates_[first]);
    for (std::size_t c = first + 1; c < last; ++c)
    {
      double const s = rank_score(weights, candidates_[c]);
      if (s > score)
      {
        score = s;
        best  = c;
      }
    }
    result.objective += score;
    auto const &chosen = candidates_[best];
    auto const &truth  = truth_[z];
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      result.diff_sum[k] += chosen[k] - truth[k];
    }
  }
  return result;
}

std::vector<GridEvaluation> evaluate_grid(ScoringTable const &table, std::span<WeightVector const> grid)
{
  std::vector<GridEvaluation> out(grid.size());

  auto const workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), grid.size()));
  auto const work = [&](std::size_t first, std::size_t last) {
    for (std::size_t g = first; g < last; ++g)
    {
      out[g] = table.evaluate(grid[g]);
    }
  };

  if (workers == 1)
  {
    work(0, grid.size());
    return out;
  }

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    auto const chunk = (grid.size() + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t)
    {
      auto const first = std::min(grid.size(), t * chunk);
      auto const last  = std::min(grid.size(), first + chunk);
      threads.emplace_back(work, first, last);
    }
  }
  return out;
}

OptimizationResult pick_optimum(std::span<WeightVector const> grid, std::span<GridEvaluation const> evaluations,
                                MetricVector const &theta)
{
  OptimizationResult result;
  result.grid_size = grid.size();

  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.size(); ++g)
  {
    auto const &eval = evaluations[g];
    if (!satisfies(eval.changes(), theta))
    {
      continue;
    }
    ++result.feasible_count;
    if (!best)
    {
      best = g;
      continue;
    }
    auto const &incumbent = evaluations[*best];
    if (eval.objective > incumbent.objective ||
        (eval.objective == incumbent.objective && grid[g].values() > grid[*best].values()))
    {
      best = g;
    }
  }

  if (best)
  {
    result.weights       = grid[*best];
    result.objective     = evaluations[*best].objective;
    result.train_changes = evaluations[*best].changes();
    result.infeasible    = false;
  }
  return result;
}

OptimizationResult optimize(std::span<MetricMatrix const> train, TradeoffConfig const &config)
{
  config.validate();
  if (train.empty())
  {
    throw InvalidAuction("cannot optimize on an empty training set");
  }
  auto const grid  = enumerate_simplex(config.grid_step);
  auto const table = ScoringTable(train);
  auto const evals = evaluate_grid(table, grid);
  return pick_optimum(grid, evals, config.theta);
}

}  // namespace tsrtb
