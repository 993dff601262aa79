#include "support/oracles.hpp"
#include "tsrtb/auction.hpp"
#include "tsrtb/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tsrtb;

namespace {

AuctionRecord make(std::vector<double> const &bids, double reserve = 0.0)
{
  AuctionRecord a;
  a.auction_id = "t";
  a.reserve    = reserve;
  for (std::size_t i = 0; i < bids.size(); ++i)
  {
    a.bids.push_back({"adv" + std::to_string(i), bids[i], bids[i]});
  }
  return a;
}

}  // namespace

TEST(rank_bids, already_sorted)
{
  EXPECT_EQ(rank_bids(make({5, 3, 2})), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(rank_bids, sorts_by_descending_bid)
{
  EXPECT_EQ(rank_bids(make({2, 5, 3})), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(rank_bids, equal_bids_and_values_fall_back_to_advertiser_id)
{
  EXPECT_EQ(rank_bids(make({4, 4, 1})), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(rank_bids, equal_bids_prefer_higher_value)
{
  auto a          = make({4, 4, 1});
  a.bids[1].value = 9;
  EXPECT_EQ(rank_bids(a), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(rank_bids, rejects_invalid_records)
{
  EXPECT_THROW(rank_bids(make({})), InvalidAuction);
  EXPECT_THROW(rank_bids(make({1, -1})), InvalidAuction);

  auto dup             = make({3, 2});
  dup.bids[1].advertiser_id = dup.bids[0].advertiser_id;
  EXPECT_THROW(rank_bids(dup), InvalidAuction);

  EXPECT_THROW(rank_bids(make({1, 2}, 5)), InvalidAuction);
}

TEST(allocate, identity_after_sort)
{
  auto const r = allocate(make({5, 3}));
  EXPECT_EQ(r.allocation(0, 0), 1);
  EXPECT_EQ(r.allocation(0, 1), 0);
  EXPECT_EQ(r.allocation(1, 0), 0);
  EXPECT_EQ(r.allocation(1, 1), 1);
}

TEST(allocate, swapped)
{
  auto const r = allocate(make({3, 5}));
  EXPECT_EQ(r.allocation(0, 1), 1);
  EXPECT_EQ(r.allocation(1, 0), 1);
  EXPECT_EQ(r.allocation(0, 0), 0);
  EXPECT_EQ(r.allocation(1, 1), 0);
}

TEST(allocate, single_bidder)
{
  auto const r = allocate(make({1}));
  EXPECT_EQ(r.allocation.size(), 1u);
  EXPECT_EQ(r.allocation(0, 0), 1);
}

TEST(payments, reserve_zero)
{
  auto a = make({5, 3, 2});
  auto r = allocate(a);
  EXPECT_EQ(compute_payments(a, r), (std::vector<double>{3, 2, 0}));
  EXPECT_EQ(r.utilities, (std::vector<double>{2, 1, 2}));
}

TEST(payments, reserve_replaces_missing_bid)
{
  auto const r = run_auction(make({5, 3, 2}, 1));
  EXPECT_EQ(r.payments, (std::vector<double>{3, 2, 1}));
}

TEST(payments, bids_below_reserve_are_excluded)
{
  auto const r = run_auction(make({5, 0.5, 3}, 1));
  EXPECT_EQ(r.ranking, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.payments, (std::vector<double>{3, 0, 1}));
  EXPECT_EQ(r.utilities[1], 0.0);
  EXPECT_FALSE(r.slot_of[1].has_value());
  EXPECT_EQ(r.allocation.row_sum(1), 0u);
}

TEST(payments, matches_sort_and_shift_oracle)
{
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 2000; ++trial)
  {
    auto const a = oracle::random_auction(rng, 6, trial % 2 == 0);
    EXPECT_EQ(run_auction(a).payments, oracle::payments(a)) << "trial " << trial;
  }
}

TEST(auction_properties, feasibility_monotonicity_and_scaling)
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial)
  {
    auto a = oracle::random_auction(rng, 6, trial % 3 == 0);
    for (auto &b : a.bids)
    {
      b.value = b.amount;
    }
    auto const r = run_auction(a);
    auto const n = a.size();

    std::size_t set = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
      EXPECT_LE(r.allocation.row_sum(i), 1u);
      EXPECT_LE(r.allocation.column_sum(i), 1u);
      for (std::size_t j = 0; j < n; ++j)
      {
        EXPECT_LE(r.allocation(i, j), 1);
        set += r.allocation(i, j);
      }
      EXPECT_LE(r.payments[i], a.bids[i].amount);
      EXPECT_GE(r.utilities[i], 0.0);
    }
    EXPECT_EQ(set, r.ranking.size());

    for (std::size_t s = 1; s < r.ranking.size(); ++s)
    {
      EXPECT_LE(r.payments[r.ranking[s]], r.payments[r.ranking[s - 1]]);
    }
    EXPECT_EQ(r.payments[r.ranking.back()], a.reserve);

    auto scaled = a;
    double const c = 3.5;
    for (auto &b : scaled.bids)
    {
      b.amount *= c;
      b.value *= c;
    }
    scaled.reserve *= c;
    auto const rs = run_auction(scaled);
    EXPECT_EQ(rs.ranking, r.ranking);
    for (std::size_t i = 0; i < n; ++i)
    {
      EXPECT_DOUBLE_EQ(rs.payments[i], c * r.payments[i]);
    }
  }
}
