#pragma once

#include "tsrtb/metrics.hpp"
#include "tsrtb/reranker.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tsrtb {

/// Trade-off thresholds and search settings.
///
/// theta[0] is the largest tolerated relative revenue loss (in [-1, 0]);
/// theta[1..5] are the smallest required relative gains of the other metrics.
struct TradeoffConfig
{
  MetricVector theta{};
  double       grid_step = 0.05;

  /// Throws ConfigError on out-of-range thresholds or a step that does not
  /// divide 1.
  void validate() const;

  static TradeoffConfig revenue_cap(double theta1, double grid_step = 0.05);
};

/// Relative change of every metric between model and ground-truth selections
/// over an auction set. A metric whose ground-truth column sums to zero has
/// no defined change.
struct ChangeVector
{
  std::array<std::optional<double>, kMetricCount> xi{};

  std::optional<double> operator[](std::size_t k) const { return xi[k]; }
  bool                  all_defined() const;
};

/// sum_z (x_sel - x_truth) / sum_z x_truth, per metric.
/// Throws InvalidAuction on an empty outcome set.
ChangeVector changes(std::span<RerankOutcome const> outcomes);

/// Revenue cap |xi_1| <= |theta_1| and gains xi_k >= theta_k; undefined
/// changes never satisfy a constraint.
bool satisfies(ChangeVector const &changes, MetricVector const &theta);

/// Number of grid steps in the unit interval. Throws ConfigError unless
/// 1 / step is a positive integer.
std::size_t simplex_divisions(double step);

/// Every weight vector whose components are multiples of `step`, in
/// descending lexicographic order of components.
std::vector<WeightVector> enumerate_simplex(double step);

/// Totals for one weight vector over a training set.
struct GridEvaluation
{
  double       objective = 0.0;  // sum of selected rank scores
  MetricVector diff_sum{};       // sum of (x_sel - x_truth)
  MetricVector truth_sum{};      // sum of x_truth

  ChangeVector changes() const;
};

/// Normalized candidates of an auction set, packed for repeated argmax
/// evaluation. Candidates are stored in selection priority order and strictly
/// dominated candidates are dropped, which leaves every argmax unchanged.
class ScoringTable
{
public:
  explicit ScoringTable(std::span<MetricMatrix const> normalized);

  std::size_t auction_count() const { return truth_.size(); }
  std::size_t candidate_count() const { return candidates_.size(); }

  GridEvaluation evaluate(WeightVector const &weights) const;

private:
  std::vector<std::size_t>  offsets_;
  std::vector<MetricVector> candidates_;
  std::vector<MetricVector> truth_;
  MetricVector              truth_sum_{};
};

/// evaluate() for every grid point, spread over hardware threads. Output
/// order matches `grid`.
std::vector<GridEvaluation> evaluate_grid(ScoringTable const &table,
                                          std::span<WeightVector const> grid);

struct OptimizationResult
{
  std::optional<WeightVector> weights;
  double                      objective = 0.0;
  ChangeVector                train_changes;
  std::size_t                 feasible_count = 0;
  std::size_t                 grid_size      = 0;
  bool                        infeasible     = true;
};

/// Feasible grid point with the largest objective. Ties go to the larger
/// revenue weight, then the lexicographically larger weight vector.
OptimizationResult pick_optimum(std::span<WeightVector const>   grid,
                                std::span<GridEvaluation const> evaluations,
                                MetricVector const             &theta);

/// Exhaustive search of the weight simplex on a normalized training set.
OptimizationResult optimize(std::span<MetricMatrix const> train, TradeoffConfig const &config);

}  // namespace tsrtb
