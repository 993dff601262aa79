#include "tsrtb/reranker.hpp"

#include "tsrtb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsrtb {

WeightVector::WeightVector()
  : w_{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}
{}

WeightVector::WeightVector(MetricVector weights)
  : w_(weights)
{
  double sum = 0.0;
  for (auto w : w_)
  {
    if (!(w >= 0.0 && w <= 1.0))
    {
      throw ConfigError("weight " + std::to_string(w) + " outside [0, 1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
  {
    throw ConfigError("weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

std::vector<std::size_t> selection_priority(MetricMatrix const &matrix)
{
  std::vector<std::size_t> order(matrix.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto const &x = matrix.rows[a];
    auto const &y = matrix.rows[b];
    if (x.normalized != y.normalized)
    {
      return x.normalized > y.normalized;
    }
    if (x.stage1_rank != y.stage1_rank)
    {
      return x.stage1_rank < y.stage1_rank;
    }
    return x.ad_id < y.ad_id;
  });
  return order;
}

RerankOutcome select(WeightVector const &weights, MetricMatrix const &matrix)
{
  if (matrix.rows.empty())
  {
    throw InvalidAuction("auction '" + matrix.auction_id + "': no candidates to re-rank");
  }

  auto const  order      = selection_priority(matrix);
  std::size_t best       = order.front();
  double      best_score = rank_score(weights, matrix.rows[best].normalized);
  for (auto it = order.begin() + 1; it != order.end(); ++it)
  {
    double const score = rank_score(weights, matrix.rows[*it].normalized);
    if (score > best_score)
    {
      best       = *it;
      best_score = score;
    }
  }

  auto const &chosen = matrix.rows[best];
  auto const &truth  = matrix.ground_truth();

  RerankOutcome outcome;
  outcome.auction_id              = matrix.auction_id;
  outcome.selected_row            = best;
  outcome.selected_advertiser     = chosen.advertiser_id;
  outcome.selected_ad             = chosen.ad_id;
  outcome.ground_truth_advertiser = truth.advertiser_id;
  outcome.ground_truth_ad         = truth.ad_id;
  outcome.selected_x              = chosen.normalized;
  outcome.ground_truth_x          = truth.normalized;
  outcome.selected_score          = best_score;
  outcome.ground_truth_score      = rank_score(weights, truth.normalized);
  outcome.payment                 = chosen.payment;
  return outcome;
}

bool strictly_dominates(MetricVector const &a, MetricVector const &b)
{
  bool strict = false;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    if (a[k] < b[k])
    {
      return false;
    }
    strict = strict || a[k] > b[k];
  }
  return strict;
}

std::string_view to_string(DominanceClass c)
{
  switch (c)
  {
  case DominanceClass::Selectable:
    return "selectable";
  case DominanceClass::StrictlyDominated:
    return "strictly_dominated";
  case DominanceClass::WeaklyDominated:
    return "weakly_dominated";
  }
  return "unknown";
}

std::vector<DominanceEntry> dominance_report(MetricMatrix const              &matrix,
                                             std::vector<WeightVector> const &grid)
{
  if (grid.empty())
  {
    throw ConfigError("dominance report needs a non-empty weight grid");
  }

  std::vector<DominanceEntry> entries(matrix.rows.size());
  for (std::size_t i = 0; i < matrix.rows.size(); ++i)
  {
    entries[i].ad_id         = matrix.rows[i].ad_id;
    entries[i].advertiser_id = matrix.rows[i].advertiser_id;
  }

  for (std::size_t g = 0; g < grid.size(); ++g)
  {
    entries[select(grid[g], matrix).selected_row].winning_points.push_back(g);
  }

  for (std::size_t i = 0; i < matrix.rows.size(); ++i)
  {
    auto &entry = entries[i];
    for (std::size_t j = 0; j < matrix.rows.size(); ++j)
    {
      if (j != i && strictly_dominates(matrix.rows[j].normalized, matrix.rows[i].normalized))
      {
        entry.classification = DominanceClass::StrictlyDominated;
        entry.dominated_by   = matrix.rows[j].ad_id;
        break;
      }
    }
    if (entry.classification != DominanceClass::StrictlyDominated && entry.winning_points.empty())
    {
      entry.classification = DominanceClass::WeaklyDominated;
    }
  }
  return entries;
}

}  // namespace tsrtb
