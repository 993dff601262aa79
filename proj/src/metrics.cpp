#include "tsrtb/metrics.hpp"

#include "tsrtb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsrtb {

std::string_view metric_name(MetricKind kind)
{
  switch (kind)
  {
  case MetricKind::Revenue:
    return "revenue";
  case MetricKind::Utility:
    return "utility";
  case MetricKind::Memorability:
    return "memorability";
  case MetricKind::Ctr:
    return "ctr";
  case MetricKind::Relevance:
    return "relevance";
  case MetricKind::Saliency:
    return "saliency";
  }
  return "unknown";
}

namespace {

void check_range(RawMetricRecord const &record, char const *field, std::optional<double> value,
                 double upper)
{
  if (value && !(std::isfinite(*value) && *value >= 0.0 && *value <= upper))
  {
    throw ValidationError("ad '" + record.ad_id + "': " + field + " = " + std::to_string(*value) +
                          " outside [0, " + std::to_string(upper) + "]");
  }
}

double require(RawMetricRecord const &record, MetricKind kind, std::optional<double> value)
{
  if (!value)
  {
    throw MissingMetric(record.ad_id, std::string(metric_name(kind)));
  }
  return *value;
}

}  // namespace

void validate(RawMetricRecord const &record)
{
  check_range(record, "memorability", record.memorability, 1.0);
  check_range(record, "ctr", record.ctr, 1.0);
  check_range(record, "relevance", record.relevance, kMaxRelevance);
  check_range(record, "saliency", record.saliency, 1.0);
}

MetricMatrix assemble_raw(AuctionRecord const &auction, AllocationResult const &allocation,
                          std::span<RawMetricRecord const> scores)
{
  if (scores.size() != auction.size())
  {
    throw InvalidAuction("auction '" + auction.auction_id + "': " + std::to_string(scores.size()) +
                         " score records for " + std::to_string(auction.size()) + " bidders");
  }
  if (allocation.payments.size() != auction.size())
  {
    throw InvalidAuction("auction '" + auction.auction_id + "': payments not computed");
  }

  MetricMatrix matrix;
  matrix.auction_id = auction.auction_id;
  matrix.rows.reserve(allocation.ranking.size());

  for (std::size_t rank = 0; rank < allocation.ranking.size(); ++rank)
  {
    auto const  i      = allocation.ranking[rank];
    auto const &record = scores[i];

    MetricRow row;
    row.advertiser_index = i;
    row.advertiser_id    = auction.bids[i].advertiser_id;
    row.ad_id            = record.ad_id;
    row.stage1_rank      = rank;
    row.payment          = allocation.payments[i];
    row.raw              = {
        allocation.payments[i],
        allocation.utilities[i],
        require(record, MetricKind::Memorability, record.memorability),
        require(record, MetricKind::Ctr, record.ctr),
        require(record, MetricKind::Relevance, record.relevance),
        require(record, MetricKind::Saliency, record.saliency),
    };
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

double Normalizer::scale(MetricKind kind, double x) const
{
  auto const k    = index(kind);
  auto const span = max_[k] - min_[k];
  if (!(span > 0.0))
  {
    return 0.0;
  }
  return std::clamp((x - min_[k]) / span, 0.0, 1.0);
}

MetricVector Normalizer::scale(MetricVector const &raw) const
{
  MetricVector out{};
  for (auto kind : kAllMetrics)
  {
    out[index(kind)] = scale(kind, raw[index(kind)]);
  }
  return out;
}

Normalizer fit_normalizer(std::span<MetricMatrix const> matrices)
{
  MetricVector lo;
  MetricVector hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());

  bool any = false;
  for (auto const &matrix : matrices)
  {
    for (auto const &row : matrix.rows)
    {
      any = true;
      for (std::size_t k = 0; k < kMetricCount; ++k)
      {
        lo[k] = std::min(lo[k], row.raw[k]);
        hi[k] = std::max(hi[k], row.raw[k]);
      }
    }
  }
  if (!any)
  {
    throw InvalidAuction("cannot fit a normalizer on an empty auction set");
  }
  return Normalizer(lo, hi);
}

MetricMatrix apply_normalizer(Normalizer const &normalizer, MetricMatrix raw)
{
  for (auto &row : raw.rows)
  {
    row.normalized = normalizer.scale(row.raw);
  }
  return raw;
}

}  // namespace tsrtb
