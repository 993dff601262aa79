#include "tsrtb/simulation.hpp"

#include "tsrtb/error.hpp"
#include "tsrtb/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace tsrtb {

Rng make_rng(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

CtrModel::CtrModel(double lower, double upper)
  : lower_(lower)
  , upper_(upper)
{
  if (!(lower >= 0.0 && lower <= upper && upper <= 1.0))
  {
    throw ConfigError("CTR bounds must satisfy 0 <= lower <= upper <= 1");
  }
}

double CtrModel::sample(Rng &rng) const
{
  std::uniform_real_distribution<double> dist(lower_, upper_);
  return std::min(dist(rng), upper_);
}

void MetricTable::insert(std::string const &webpage_id, RawMetricRecord record, bool displayed)
{
  auto const ad_id = record.ad_id;
  if (!records_.emplace(std::make_pair(webpage_id, ad_id), std::move(record)).second)
  {
    throw ValidationError("duplicate metric record for webpage '" + webpage_id + "', ad '" + ad_id + "'");
  }
  if (displayed && !displayed_.emplace(webpage_id, ad_id).second)
  {
    throw ValidationError("webpage '" + webpage_id + "' has more than one displayed ad");
  }
}

RawMetricRecord const *MetricTable::find(std::string const &webpage_id, std::string const &ad_id) const
{
  auto it = records_.find({webpage_id, ad_id});
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<std::string> MetricTable::webpages() const
{
  std::vector<std::string> out;
  out.reserve(displayed_.size());
  for (auto const &[page, ad] : displayed_)
  {
    out.push_back(page);
  }
  return out;
}

std::string const *MetricTable::displayed_ad(std::string const &webpage_id) const
{
  auto it = displayed_.find(webpage_id);
  return it == displayed_.end() ? nullptr : &it->second;
}

std::vector<RawMetricRecord> MetricTable::ad_pool(std::string const &webpage_id) const
{
  std::vector<RawMetricRecord> pool;
  auto const                  *shown = displayed_ad(webpage_id);
  for (auto it = records_.lower_bound({webpage_id, std::string()});
       it != records_.end() && it->first.first == webpage_id; ++it)
  {
    if (!shown || it->first.second != *shown)
    {
      pool.push_back(it->second);
    }
  }
  return pool;
}

namespace {

template <typename Parse>
void ingest_lines(std::filesystem::path const &path, std::vector<std::string> *warnings, Parse parse)
{
  if (!std::filesystem::exists(path))
  {
    throw ConfigError("input file not found: " + path.string());
  }
  std::size_t count = 0;
  for_each_jsonl(path, [&](std::size_t line, Json const &j) {
    try
    {
      parse(j);
    }
    catch (std::invalid_argument const &e)
    {
      throw ParseError(path.string(), line, e.what());
    }
    catch (nlohmann::json::exception const &e)
    {
      throw ParseError(path.string(), line, e.what());
    }
    catch (ValidationError const &e)
    {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    catch (InvalidAuction const &e)
    {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    ++count;
  });
  if (count == 0 && warnings)
  {
    warnings->push_back(path.string() + ": no records");
  }
}

}  // namespace

std::vector<AuctionRecord> ingest_auctions(std::filesystem::path const &path, std::vector<std::string> *warnings)
{
  std::vector<AuctionRecord> out;
  ingest_lines(path, warnings, [&](Json const &j) {
    auto auction = auction_from_json(j);
    validate(auction);
    out.push_back(std::move(auction));
  });
  return out;
}

MetricTable ingest_metrics(std::filesystem::path const &path, std::vector<std::string> *warnings)
{
  MetricTable table;
  ingest_lines(path, warnings, [&](Json const &j) {
    auto line = metric_line_from_json(j);
    validate(line.record);
    table.insert(line.webpage_id, std::move(line.record), line.displayed);
  });
  return table;
}

SimulatedImpression build_impression(std::string const &webpage_id, RawMetricRecord const &ground_truth_ad,
                                     AuctionRecord const &auction, std::span<RawMetricRecord const> ad_pool,
                                     CtrModel const &ctr_model, Rng &rng)
{
  auto const ranking = rank_bids(auction);
  auto const n       = auction.size();

  std::vector<std::size_t> pool;
  pool.reserve(ad_pool.size());
  for (std::size_t i = 0; i < ad_pool.size(); ++i)
  {
    if (ad_pool[i].ad_id != ground_truth_ad.ad_id)
    {
      pool.push_back(i);
    }
  }
  if (pool.size() < n - 1)
  {
    throw SamplingError("webpage '" + webpage_id + "': auction '" + auction.auction_id + "' has " +
                        std::to_string(n) + " bidders but only " + std::to_string(pool.size()) +
                        " candidate ads are available");
  }

  std::vector<std::size_t> drawn;
  drawn.reserve(n - 1);
  std::sample(pool.begin(), pool.end(), std::back_inserter(drawn), n - 1, rng);
  std::shuffle(drawn.begin(), drawn.end(), rng);

  SimulatedImpression impression;
  impression.webpage_id      = webpage_id;
  impression.auction         = auction;
  impression.ground_truth_ad = ground_truth_ad.ad_id;
  impression.scores.resize(n);

  auto const winner            = ranking.front();
  impression.scores[winner]    = ground_truth_ad;
  std::size_t next             = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    if (i != winner)
    {
      impression.scores[i] = ad_pool[drawn[next++]];
    }
  }
  for (auto &score : impression.scores)
  {
    if (!score.ctr)
    {
      score.ctr = ctr_model.sample(rng);
    }
  }
  return impression;
}

std::vector<SimulatedImpression> simulate_from_sources(std::span<AuctionRecord const> auctions,
                                                       MetricTable const &metrics, CtrModel const &ctr_model,
                                                       std::uint64_t seed)
{
  auto const pages = metrics.webpages();
  if (!pages.empty() && auctions.empty())
  {
    throw SamplingError("no auctions to sample from");
  }

  std::vector<SimulatedImpression> out;
  out.reserve(pages.size());
  std::uniform_int_distribution<std::size_t> pick(0, auctions.empty() ? 0 : auctions.size() - 1);
  for (std::size_t p = 0; p < pages.size(); ++p)
  {
    auto        rng     = make_rng(seed, p + 1);
    auto const &page    = pages[p];
    auto        auction = auctions[pick(rng)];
    auction.auction_id += "@" + page;

    auto const *truth = metrics.find(page, *metrics.displayed_ad(page));
    auto const  pool  = metrics.ad_pool(page);
    out.push_back(build_impression(page, *truth, auction, pool, ctr_model, rng));
  }
  return out;
}

void SynthesisSpec::validate() const
{
  if (bidders_min < 1 || bidders_min > bidders_max)
  {
    throw ConfigError("bidder range must satisfy 1 <= min <= max");
  }
  if (ad_pool < bidders_max)
  {
    throw ConfigError("ad pool of " + std::to_string(ad_pool) + " cannot fill auctions with " +
                      std::to_string(bidders_max) + " bidders");
  }
  if (!std::isfinite(bid_log_mean) || !(bid_log_sigma > 0.0) || !std::isfinite(bid_log_sigma))
  {
    throw ConfigError("bid distribution needs a finite log-mean and a positive log-sigma");
  }
  if (!(value_markup >= 0.0) || !std::isfinite(value_markup))
  {
    throw ConfigError("value markup must be a finite value >= 0");
  }
  if (!(bid_tick >= 0.0) || !std::isfinite(bid_tick))
  {
    throw ConfigError("bid tick must be a finite value >= 0");
  }
  if (!(reserve >= 0.0) || !std::isfinite(reserve))
  {
    throw ConfigError("reserve must be a finite value >= 0");
  }
}

namespace {

std::string numbered(char const *prefix, std::size_t i, int width)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

std::vector<SimulatedImpression> synthesize_dataset(SynthesisSpec const &spec, std::uint64_t seed,
                                                    CtrModel const &ctr_model)
{
  spec.validate();

  std::vector<std::string> ad_ids(spec.ad_pool);
  std::vector<double>      memorability(spec.ad_pool);
  {
    auto                                   rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t a = 0; a < spec.ad_pool; ++a)
    {
      ad_ids[a]       = numbered("ad", a, 5);
      memorability[a] = unit(rng);
    }
  }

  std::vector<SimulatedImpression> out;
  out.reserve(spec.impressions);
  for (std::size_t z = 0; z < spec.impressions; ++z)
  {
    auto rng = make_rng(seed, z + 1);

    std::uniform_int_distribution<std::size_t> bidder_count(spec.bidders_min, spec.bidders_max);
    std::lognormal_distribution<double>        bid_dist(spec.bid_log_mean, spec.bid_log_sigma);
    std::uniform_real_distribution<double>     unit(0.0, 1.0);
    std::uniform_real_distribution<double>     relevance(0.0, kMaxRelevance);
    std::uniform_int_distribution<std::size_t> pick_ad(0, spec.ad_pool - 1);

    auto const page = numbered("w", z, 6);

    AuctionRecord auction;
    auction.auction_id = numbered("a", z, 6);
    auction.reserve    = spec.reserve;
    auto const n       = bidder_count(rng);
    for (std::size_t i = 0; i < n; ++i)
    {
      // Keep every synthetic bid admissible so candidate count equals n.
      double bid = bid_dist(rng);
      if (spec.bid_tick > 0.0)
      {
        bid = spec.bid_tick * std::ceil(bid / spec.bid_tick);
      }
      bid += spec.reserve;
      double const value = spec.value_markup > 0.0 ? bid * (1.0 + spec.value_markup * unit(rng)) : bid;
      auction.bids.push_back({numbered("adv", i, 2), bid, value});
    }

    auto const make_record = [&](std::size_t a) {
      RawMetricRecord r;
      r.ad_id        = ad_ids[a];
      r.memorability = memorability[a];
      r.relevance    = std::min(relevance(rng), kMaxRelevance);
      r.saliency     = std::min(unit(rng), 1.0);
      return r;
    };

    auto const               truth_index = pick_ad(rng);
    std::vector<std::size_t> others;
    others.reserve(spec.ad_pool - 1);
    for (std::size_t a = 0; a < spec.ad_pool; ++a)
    {
      if (a != truth_index)
      {
        others.push_back(a);
      }
    }
    std::vector<std::size_t> chosen;
    std::sample(others.begin(), others.end(), std::back_inserter(chosen), n - 1, rng);

    auto const                   truth = make_record(truth_index);
    std::vector<RawMetricRecord> pool;
    pool.reserve(chosen.size());
    for (auto a : chosen)
    {
      pool.push_back(make_record(a));
    }
    out.push_back(build_impression(page, truth, auction, pool, ctr_model, rng));
  }
  return out;
}

}  // namespace tsrtb
