#pragma once

#include "tsrtb/optimizer.hpp"
#include "tsrtb/simulation.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsrtb {

/// Runs Stage I on every impression and assembles its raw metric rows.
std::vector<MetricMatrix> raw_matrices(std::span<SimulatedImpression const> impressions);

/// Normalizes every matrix with min/max fitted on the whole set.
std::vector<MetricMatrix> normalize_all(std::span<MetricMatrix const> raw);

/// Fold index of every item: round-robin over a seeded shuffle.
std::vector<std::size_t> assign_folds(std::size_t count, std::size_t k, std::uint64_t seed);

struct FoldReport
{
  std::size_t                 fold       = 0;
  std::size_t                 train_size = 0;
  std::size_t                 test_size  = 0;
  bool                        infeasible = true;
  std::size_t                 feasible_count = 0;
  std::optional<WeightVector> weights;
  ChangeVector                train_changes;
  ChangeVector                test_changes;
  double                      train_objective = 0.0;
  double                      test_objective  = 0.0;
  /// Test-fold changes outside the thresholds. Reported, never enforced.
  bool test_violates_theta = false;
};

/// Per-metric mean and sample standard deviation over feasible folds.
struct ColumnStats
{
  std::array<std::optional<double>, kMetricCount> mean{};
  std::array<std::optional<double>, kMetricCount> std{};
};

struct FoldSummary
{
  ColumnStats              train;
  ColumnStats              test;
  std::optional<double>    mean_train_objective;
  std::optional<double>    mean_test_objective;
  std::vector<std::size_t> infeasible_folds;
};

FoldSummary summarize(std::span<FoldReport const> folds);

struct CrossValidationReport
{
  TradeoffConfig          config;
  std::size_t             k    = 0;
  std::uint64_t           seed = 0;
  std::vector<FoldReport> folds;
  FoldSummary             summary;
};

/// k-fold cross-validation: per fold, fit the normalizer and the weights on
/// the training part and measure changes on both parts. Throws ConfigError
/// unless 2 <= k <= impressions.
CrossValidationReport cross_validate(std::span<SimulatedImpression const> impressions,
                                     TradeoffConfig const &config, std::size_t k, std::uint64_t seed);

struct SweepPoint
{
  double                  theta1 = 0.0;
  std::vector<FoldReport> folds;
  FoldSummary             summary;
  std::size_t             infeasible_count = 0;
};

/// Cross-validation at every revenue cap in `theta1_values` (sorted into
/// strictly decreasing order); the other thresholds come from `config`.
/// Each fold's grid is evaluated once and shared by all caps.
std::vector<SweepPoint> sweep_theta1(std::span<SimulatedImpression const> impressions,
                                     TradeoffConfig const &config, std::span<double const> theta1_values,
                                     std::size_t k, std::uint64_t seed);

/// Pearson correlations between the raw metrics of the ground-truth ads.
/// Entries are empty where a metric is constant.
struct CorrelationReport
{
  std::size_t                                                           samples = 0;
  std::array<std::array<std::optional<double>, kMetricCount>, kMetricCount> r{};
};

/// Throws InvalidAuction with fewer than two impressions.
CorrelationReport correlation_report(std::span<SimulatedImpression const> impressions);

}  // namespace tsrtb
