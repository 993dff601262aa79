#pragma once

// Input builders shared by the unit and acceptance tests.

#include "tsrtb/auction.hpp"
#include "tsrtb/metrics.hpp"
#include "tsrtb/optimizer.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace tsrtb::fixture {

/// Small auction set run through Stage I and normalized on itself. Metric
/// scores sit on a coarse lattice so that rank-score ties are frequent.
inline std::vector<MetricMatrix> toy_instance(std::mt19937_64 &rng, std::size_t max_auctions,
                                              std::size_t max_bidders)
{
  std::uniform_int_distribution<std::size_t> auctions(std::min<std::size_t>(2, max_auctions), max_auctions);
  std::uniform_int_distribution<std::size_t> bidders(std::min<std::size_t>(2, max_bidders), max_bidders);
  std::uniform_int_distribution<int>         level(0, 4);
  std::uniform_real_distribution<double>     bid(0.1, 5.0);

  std::vector<MetricMatrix> raw;
  auto const                count = auctions(rng);
  for (std::size_t a = 0; a < count; ++a)
  {
    AuctionRecord                record;
    std::vector<RawMetricRecord> scores;
    record.auction_id = "toy" + std::to_string(a);
    auto const n      = bidders(rng);
    for (std::size_t i = 0; i < n; ++i)
    {
      double const b = bid(rng);
      record.bids.push_back({"adv" + std::to_string(i), b, b * 1.5});
      scores.push_back({record.auction_id + "-ad" + std::to_string(i), 0.25 * level(rng), 0.25 * level(rng),
                        1.25 * level(rng), 0.25 * level(rng)});
    }
    raw.push_back(assemble_raw(record, run_auction(record), scores));
  }
  auto const                norm = fit_normalizer(raw);
  std::vector<MetricMatrix> out;
  for (auto const &m : raw)
    out.push_back(apply_normalizer(norm, m));
  return out;
}

inline MetricVector random_theta(std::mt19937_64 &rng)
{
  static constexpr double kTheta1[] = {0.0, -0.2, -0.5, -1.0, -1.0};
  static constexpr double kThetaK[] = {0.0, 0.0, 0.0, 0.0, 0.05};
  std::uniform_int_distribution<int> pick(0, 4);
  MetricVector                       theta{};
  theta[0] = kTheta1[pick(rng)];
  for (std::size_t k = 1; k < kMetricCount; ++k)
    theta[k] = kThetaK[pick(rng)];
  return theta;
}

}  // namespace tsrtb::fixture
