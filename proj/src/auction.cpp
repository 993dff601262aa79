#include "tsrtb/auction.hpp"

#include "tsrtb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace tsrtb {

void validate(AuctionRecord const &auction)
{
  auto const fail = [&](std::string const &why) {
    throw InvalidAuction("auction '" + auction.auction_id + "': " + why);
  };

  if (auction.bids.empty())
  {
    fail("empty bid list");
  }
  if (!std::isfinite(auction.reserve) || auction.reserve < 0.0)
  {
    fail("reserve must be a finite value >= 0");
  }

  std::unordered_set<std::string> seen;
  bool                            any_admitted = false;
  for (auto const &bid : auction.bids)
  {
    if (!std::isfinite(bid.amount) || bid.amount < 0.0)
    {
      fail("bid of '" + bid.advertiser_id + "' must be a finite value >= 0");
    }
    if (!std::isfinite(bid.value) || bid.value < 0.0)
    {
      fail("value of '" + bid.advertiser_id + "' must be a finite value >= 0");
    }
    if (!seen.insert(bid.advertiser_id).second)
    {
      fail("duplicate advertiser id '" + bid.advertiser_id + "'");
    }
    any_admitted = any_admitted || bid.amount >= auction.reserve;
  }
  if (!any_admitted)
  {
    fail("no bid meets the reserve");
  }
}

std::size_t AllocationMatrix::row_sum(std::size_t advertiser) const
{
  auto const first = cells_.begin() + static_cast<std::ptrdiff_t>(advertiser * n_);
  return static_cast<std::size_t>(std::accumulate(first, first + static_cast<std::ptrdiff_t>(n_), 0));
}

std::size_t AllocationMatrix::column_sum(std::size_t slot) const
{
  std::size_t sum = 0;
  for (std::size_t i = 0; i < n_; ++i)
  {
    sum += (*this)(i, slot);
  }
  return sum;
}

std::vector<std::size_t> rank_bids(AuctionRecord const &auction)
{
  validate(auction);

  std::vector<std::size_t> order;
  order.reserve(auction.size());
  for (std::size_t i = 0; i < auction.size(); ++i)
  {
    if (auction.bids[i].amount >= auction.reserve)
    {
      order.push_back(i);
    }
  }

  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto const &x = auction.bids[a];
    auto const &y = auction.bids[b];
    if (x.amount != y.amount)
    {
      return x.amount > y.amount;
    }
    if (x.value != y.value)
    {
      return x.value > y.value;
    }
    return x.advertiser_id < y.advertiser_id;
  });
  return order;
}

AllocationResult allocate(AuctionRecord const &auction)
{
  AllocationResult result;
  result.ranking    = rank_bids(auction);
  result.allocation = AllocationMatrix(auction.size());
  result.slot_of.assign(auction.size(), std::nullopt);

  for (std::size_t slot = 0; slot < result.ranking.size(); ++slot)
  {
    auto const advertiser = result.ranking[slot];
    result.allocation.set(advertiser, slot);
    result.slot_of[advertiser] = slot;
  }
  return result;
}

std::vector<Money> compute_payments(AuctionRecord const &auction, AllocationResult &allocation)
{
  auto const n        = auction.size();
  auto const admitted = allocation.ranking.size();

  allocation.payments.assign(n, 0.0);
  allocation.utilities.assign(n, 0.0);

  for (std::size_t slot = 0; slot < admitted; ++slot)
  {
    auto const advertiser = allocation.ranking[slot];
    Money const price =
        slot + 1 < admitted ? auction.bids[allocation.ranking[slot + 1]].amount : auction.reserve;
    allocation.payments[advertiser]  = price;
    allocation.utilities[advertiser] = auction.bids[advertiser].value - price;
  }
  return allocation.payments;
}

AllocationResult run_auction(AuctionRecord const &auction)
{
  auto result = allocate(auction);
  compute_payments(auction, result);
  return result;
}

}  // namespace tsrtb
