#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the optimizer or the selection code it checks.

#include "tsrtb/auction.hpp"
#include "tsrtb/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace tsrtb::oracle {

/// Sort-and-shift second-price payments: sort (bid, value, id) descending,
/// each admitted bidder pays the next bid down, the last pays the reserve.
inline std::vector<double> payments(AuctionRecord const &a)
{
  std::vector<std::tuple<double, double, std::string, std::size_t>> rows;
  for (std::size_t i = 0; i < a.bids.size(); ++i)
  {
    if (a.bids[i].amount >= a.reserve)
    {
      rows.emplace_back(a.bids[i].amount, a.bids[i].value, a.bids[i].advertiser_id, i);
    }
  }
  std::sort(rows.begin(), rows.end(), [](auto const &x, auto const &y) {
    if (std::get<0>(x) != std::get<0>(y))
      return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y))
      return std::get<1>(x) > std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });
  std::vector<double> out(a.bids.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    out[std::get<3>(rows[r])] = r + 1 < rows.size() ? std::get<0>(rows[r + 1]) : a.reserve;
  }
  return out;
}

/// Random auction with 1..max_bidders bidders. Bids are drawn from a coarse
/// lattice so ties are common.
inline AuctionRecord random_auction(std::mt19937_64 &rng, std::size_t max_bidders, bool with_reserve)
{
  std::uniform_int_distribution<std::size_t> count(1, max_bidders);
  std::uniform_int_distribution<int>         level(0, 8);
  AuctionRecord                              a;
  a.auction_id = "r";
  auto const n = count(rng);
  for (std::size_t i = 0; i < n; ++i)
  {
    double const bid = 0.5 * level(rng);
    a.bids.push_back({"adv" + std::to_string(n - i), bid, bid + 0.25 * level(rng)});
  }
  if (with_reserve)
  {
    double const top_bid = std::max_element(a.bids.begin(), a.bids.end(), [](auto const &x, auto const &y) {
                                return x.amount < y.amount;
                              })->amount;
    std::uniform_real_distribution<double> r(0.0, top_bid);
    a.reserve = r(rng);
  }
  return a;
}

inline double dot(std::array<double, 6> const &w, MetricVector const &x)
{
  double s = 0.0;
  for (std::size_t k = 0; k < 6; ++k)
  {
    s += w[k] * x[k];
  }
  return s;
}

/// Row index chosen by the documented selection rule, by direct comparison of
/// every pair of candidates.
inline std::size_t argmax(std::array<double, 6> const &w, MetricMatrix const &m)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < m.rows.size(); ++i)
  {
    double const si = dot(w, m.rows[i].normalized);
    double const sb = dot(w, m.rows[best].normalized);
    auto const  &ri = m.rows[i];
    auto const  &rb = m.rows[best];
    bool         better = false;
    if (si != sb)
      better = si > sb;
    else if (ri.normalized != rb.normalized)
      better = ri.normalized > rb.normalized;
    else if (ri.stage1_rank != rb.stage1_rank)
      better = ri.stage1_rank < rb.stage1_rank;
    else
      better = ri.ad_id < rb.ad_id;
    if (better)
      best = i;
  }
  return best;
}

struct BruteForceResult
{
  bool                                  infeasible = true;
  std::array<double, 6>                 weights{};
  double                                objective = 0.0;
  std::array<std::optional<double>, 6> xi{};
  std::size_t                           feasible = 0;
  std::size_t                           grid     = 0;
};

/// Exhaustive search: every composition of `divisions` into six parts, every
/// auction, every candidate.
inline BruteForceResult optimize(std::vector<MetricMatrix> const &train, std::size_t divisions,
                                 std::array<double, 6> const &theta)
{
  BruteForceResult best;
  std::array<std::size_t, 6> c{};
  for (c[0] = 0; c[0] <= divisions; ++c[0])
    for (c[1] = 0; c[0] + c[1] <= divisions; ++c[1])
      for (c[2] = 0; c[0] + c[1] + c[2] <= divisions; ++c[2])
        for (c[3] = 0; c[0] + c[1] + c[2] + c[3] <= divisions; ++c[3])
          for (c[4] = 0; c[0] + c[1] + c[2] + c[3] + c[4] <= divisions; ++c[4])
          {
            c[5] = divisions - c[0] - c[1] - c[2] - c[3] - c[4];
            ++best.grid;
            std::array<double, 6> w{};
            for (std::size_t k = 0; k < 6; ++k)
              w[k] = static_cast<double>(c[k]) / static_cast<double>(divisions);

            double                objective = 0.0;
            std::array<double, 6> diff{};
            std::array<double, 6> truth{};
            for (auto const &m : train)
            {
              auto const &sel = m.rows[argmax(w, m)].normalized;
              objective += dot(w, sel);
              for (std::size_t k = 0; k < 6; ++k)
              {
                diff[k] += sel[k] - m.rows[0].normalized[k];
                truth[k] += m.rows[0].normalized[k];
              }
            }
            std::array<std::optional<double>, 6> xi{};
            bool                                 ok = true;
            for (std::size_t k = 0; k < 6; ++k)
            {
              if (truth[k] != 0.0)
                xi[k] = diff[k] / truth[k];
              if (!xi[k])
                ok = false;
              else if (k == 0 && std::abs(*xi[k]) > std::abs(theta[0]))
                ok = false;
              else if (k > 0 && *xi[k] < theta[k])
                ok = false;
            }
            if (!ok)
              continue;
            ++best.feasible;
            if (best.infeasible || objective > best.objective ||
                (objective == best.objective && w > best.weights))
            {
              best.infeasible = false;
              best.weights    = w;
              best.objective  = objective;
              best.xi         = xi;
            }
          }
  return best;
}

/// Uniform point on the simplex (normalized exponentials).
inline MetricVector random_simplex(std::mt19937_64 &rng)
{
  std::exponential_distribution<double> e(1.0);
  MetricVector                          w{};
  double                                sum = 0.0;
  for (auto &x : w)
  {
    x = e(rng);
    sum += x;
  }
  for (auto &x : w)
    x /= sum;
  return w;
}

/// Nine-candidate reference auction, normalized values to four places.
/// Ground truth (ad 3010) first, the rest in descending revenue.
struct ReferenceRow
{
  char const  *ad_id;
  MetricVector x;
};

inline constexpr std::array<ReferenceRow, 9> kReferenceAuction = {{
    {"3010", {0.1999, 0.1101, 0.9139, 0.2596, 0.2734, 0.1059}},
    {"693", {0.1999, 0.0000, 0.7164, 0.9387, 0.1699, 0.7286}},
    {"3402", {0.1441, 0.0614, 0.8950, 0.7269, 0.2361, 0.7804}},
    {"1319", {0.0400, 0.0000, 0.8277, 0.4077, 0.2187, 0.1639}},
    {"4194", {0.0400, 0.0000, 1.0000, 0.0720, 0.2163, 0.2629}},
    {"5552", {0.0400, 0.1148, 0.5420, 0.2836, 0.3405, 0.8823}},
    {"1799", {0.0160, 0.0264, 0.5567, 0.3353, 0.3698, 0.8360}},
    {"1847", {0.0000, 0.0176, 0.8971, 0.3698, 0.2671, 0.1025}},
    {"2725", {0.0000, 0.0000, 0.9244, 0.0712, 0.2617, 0.8763}},
}};

inline MetricMatrix reference_auction()
{
  MetricMatrix m;
  m.auction_id = "reference";
  for (std::size_t i = 0; i < kReferenceAuction.size(); ++i)
  {
    MetricRow row;
    row.advertiser_index = i;
    row.advertiser_id    = std::string("adv-") + kReferenceAuction[i].ad_id;
    row.ad_id            = kReferenceAuction[i].ad_id;
    row.stage1_rank      = i;
    row.raw              = kReferenceAuction[i].x;
    row.normalized       = kReferenceAuction[i].x;
    m.rows.push_back(row);
  }
  return m;
}

/// Random normalized candidate set with `n` rows.
inline MetricMatrix random_matrix(std::mt19937_64 &rng, std::size_t n, std::string const &id = "z")
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MetricMatrix                           m;
  m.auction_id = id;
  for (std::size_t i = 0; i < n; ++i)
  {
    MetricRow row;
    row.advertiser_index = i;
    row.advertiser_id    = "adv" + std::to_string(i);
    row.ad_id            = id + "-ad" + std::to_string(i);
    row.stage1_rank      = i;
    for (auto &x : row.normalized)
      x = u(rng);
    row.raw = row.normalized;
    m.rows.push_back(row);
  }
  // Stage-I winner carries the largest revenue.
  auto top = std::max_element(m.rows.begin(), m.rows.end(),
                              [](auto const &a, auto const &b) { return a.normalized[0] < b.normalized[0]; });
  std::swap(m.rows.front().normalized[0], top->normalized[0]);
  return m;
}

}  // namespace tsrtb::oracle
