#pragma once

#include "tsrtb/auction.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsrtb {

/// The six Stage-II metric variables, in weight order.
enum class MetricKind : std::size_t
{
  Revenue = 0,
  Utility,
  Memorability,
  Ctr,
  Relevance,
  Saliency,
};

inline constexpr std::size_t kMetricCount = 6;

inline constexpr std::array<MetricKind, kMetricCount> kAllMetrics = {
    MetricKind::Revenue, MetricKind::Utility,   MetricKind::Memorability,
    MetricKind::Ctr,     MetricKind::Relevance, MetricKind::Saliency};

std::string_view metric_name(MetricKind kind);

using MetricVector = std::array<double, kMetricCount>;

constexpr std::size_t index(MetricKind kind) { return static_cast<std::size_t>(kind); }

/// Score ranges for the externally supplied metrics.
inline constexpr double kMaxRelevance = 5.0;

/// Precomputed multimedia scores for one ad on one webpage. Fields may be
/// absent after ingestion; assemble_raw() rejects records with gaps.
struct RawMetricRecord
{
  std::string           ad_id;
  std::optional<double> memorability;  // [0, 1]
  std::optional<double> ctr;           // [0, 1]
  std::optional<double> relevance;     // [0, 5]
  std::optional<double> saliency;      // [0, 1]
};

/// Throws ValidationError naming the first field outside its range.
void validate(RawMetricRecord const &record);

/// One Stage-II candidate: an admitted advertiser and the ad matched to it.
struct MetricRow
{
  std::size_t  advertiser_index = 0;
  std::string  advertiser_id;
  std::string  ad_id;
  std::size_t  stage1_rank = 0;  // 0 is the Stage-I winner
  Money        payment     = 0.0;
  MetricVector raw{};
  MetricVector normalized{};
};

/// Candidates of one auction, in Stage-I rank order (row 0 is the ground truth).
struct MetricMatrix
{
  std::string            auction_id;
  std::vector<MetricRow> rows;

  MetricRow const &ground_truth() const { return rows.front(); }
};

/// Builds raw rows (payment, utility, memorability, ctr, relevance, saliency)
/// for every admitted advertiser. `scores[i]` belongs to bidder i of `auction`.
/// Throws MissingMetric if a score is absent.
MetricMatrix assemble_raw(AuctionRecord const                &auction,
                          AllocationResult const             &allocation,
                          std::span<RawMetricRecord const>    scores);

/// Per-metric min-max scaling fitted on a set of auctions.
class Normalizer
{
public:
  Normalizer() = default;
  Normalizer(MetricVector min, MetricVector max)
    : min_(min)
    , max_(max)
  {}

  MetricVector const &min() const { return min_; }
  MetricVector const &max() const { return max_; }

  /// (x - min) / (max - min) clamped to [0, 1]; a constant metric maps to 0.
  double       scale(MetricKind kind, double x) const;
  MetricVector scale(MetricVector const &raw) const;

private:
  MetricVector min_{};
  MetricVector max_{};
};

/// Min and max of every metric over all rows of all matrices.
Normalizer fit_normalizer(std::span<MetricMatrix const> matrices);

/// Returns a copy of `raw` with the normalized columns filled in.
MetricMatrix apply_normalizer(Normalizer const &normalizer, MetricMatrix raw);

}  // namespace tsrtb
