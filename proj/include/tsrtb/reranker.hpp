#pragma once

#include "tsrtb/metrics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tsrtb {

/// A point on the six-dimensional probability simplex.
class WeightVector
{
public:
  static constexpr double kSumTolerance = 1e-9;

  /// Pure-revenue weights: reproduce the Stage-I ordering.
  WeightVector();
  /// Throws ConfigError unless every weight is in [0, 1] and they sum to 1.
  explicit WeightVector(MetricVector weights);

  double operator[](std::size_t k) const { return w_[k]; }
  double operator[](MetricKind kind) const { return w_[index(kind)]; }
  MetricVector const &values() const { return w_; }

  bool operator==(WeightVector const &) const = default;

private:
  MetricVector w_{};
};

/// Sum over k of weight_k * x_k, accumulated in metric order.
inline double rank_score(WeightVector const &weights, MetricVector const &x)
{
  double score = 0.0;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    score += weights[k] * x[k];
  }
  return score;
}

/// Row indices of `matrix` in tie-break priority: larger normalized vector
/// (compared lexicographically, revenue first), then better Stage-I rank, then
/// smaller ad id. On equal rank scores the earlier row wins.
std::vector<std::size_t> selection_priority(MetricMatrix const &matrix);

/// Stage-II selection for one auction.
struct RerankOutcome
{
  std::string  auction_id;
  std::size_t  selected_row = 0;
  std::string  selected_advertiser;
  std::string  selected_ad;
  std::string  ground_truth_advertiser;
  std::string  ground_truth_ad;
  MetricVector selected_x{};
  MetricVector ground_truth_x{};
  double       selected_score     = 0.0;
  double       ground_truth_score = 0.0;
  /// The selected advertiser's own Stage-I pseudo-slot payment.
  Money payment = 0.0;

  bool changed() const { return selected_row != 0; }
};

/// Argmax of rank_score over the normalized rows. Throws InvalidAuction when
/// the matrix has no candidates.
RerankOutcome select(WeightVector const &weights, MetricMatrix const &matrix);

/// True if `a` is >= `b` on every metric and > on at least one.
bool strictly_dominates(MetricVector const &a, MetricVector const &b);

enum class DominanceClass
{
  Selectable,
  StrictlyDominated,
  WeaklyDominated,
};

std::string_view to_string(DominanceClass c);

struct DominanceEntry
{
  std::string    ad_id;
  std::string    advertiser_id;
  DominanceClass classification = DominanceClass::Selectable;
  /// For strictly dominated ads, one dominating ad.
  std::string dominated_by;
  /// Indices into the grid passed to dominance_report().
  std::vector<std::size_t> winning_points;
};

/// Classifies every candidate of one auction against a weight grid.
std::vector<DominanceEntry> dominance_report(MetricMatrix const              &matrix,
                                             std::vector<WeightVector> const &grid);

}  // namespace tsrtb
