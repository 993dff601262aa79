#include "support/oracles.hpp"
#include "tsrtb/serialize.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace tsrtb;

TEST(serialize, auction_schema)
{
  auto const a = auction_from_json(Json::parse(R"({"auction_id":"a","bids":[["x",2.5]],"values":[3.0],"reserve":0.5})"));
  EXPECT_EQ(a.bids[0].value, 3.0);
  EXPECT_EQ(a.reserve, 0.5);
  EXPECT_EQ(to_json(a).dump(), R"({"auction_id":"a","bids":[["x",2.5]],"values":[3.0],"reserve":0.5})");
  EXPECT_THROW(auction_from_json(Json::parse(R"({"auction_id":"a","bids":[["x"]]})")), std::invalid_argument);
  EXPECT_THROW(auction_from_json(Json::parse(R"({"bids":[]})")), std::invalid_argument);
}

TEST(serialize, undefined_change_is_null)
{
  ChangeVector c;
  c.xi = {0.1, std::nullopt, 0, 0, 0, 0};
  EXPECT_TRUE(to_json(c)[1].is_null());
}

TEST(serialize, tradeoff_config_round_trip)
{
  TradeoffConfig c;
  c.theta     = {-0.06, 0, 0.01, 0, 0, 0};
  c.grid_step = 0.1;
  auto const back = tradeoff_config_from_json(to_json(c));
  EXPECT_EQ(back.theta, c.theta);
  EXPECT_EQ(back.grid_step, c.grid_step);
  EXPECT_EQ(weights_from_json(to_json(WeightVector({0.5, 0.5, 0, 0, 0, 0}))), WeightVector({0.5, 0.5, 0, 0, 0, 0}));
}

TEST(serialize, impressions_round_trip_through_files)
{
  SynthesisSpec spec;
  spec.impressions = 300;
  auto const imps  = synthesize_dataset(spec, 13);
  auto const dir   = std::filesystem::temp_directory_path() / "tsrtb_serialize_round_trip";
  std::filesystem::create_directories(dir);
  write_dataset(dir, imps);
  auto const back = read_impressions(dir / "impressions.jsonl");
  ASSERT_EQ(back.size(), imps.size());
  for (std::size_t i = 0; i < imps.size(); ++i)
  {
    EXPECT_EQ(to_json(back[i]).dump(), to_json(imps[i]).dump());
    for (std::size_t b = 0; b < imps[i].auction.size(); ++b)
      EXPECT_EQ(back[i].auction.bids[b].amount, imps[i].auction.bids[b].amount);
  }

  auto const auctions = ingest_auctions(dir / "auctions.jsonl");
  auto const metrics  = ingest_metrics(dir / "metrics.jsonl");
  EXPECT_EQ(auctions.size(), imps.size());
  EXPECT_EQ(metrics.webpages().size(), imps.size());
  std::filesystem::remove_all(dir);
}
