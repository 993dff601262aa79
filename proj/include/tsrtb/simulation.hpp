#pragma once

#include "tsrtb/auction.hpp"
#include "tsrtb/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tsrtb {

using Rng = std::mt19937_64;

/// Independent generator for job `stream` under a master seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform CTR model. The default upper bound is mean + 1.96 std of the
/// position-1 CTR in the Microsoft click log (13.97 and 28.49 per mille).
class CtrModel
{
public:
  static constexpr double kPosition1Mean = 13.97e-3;
  static constexpr double kPosition1Std  = 28.49e-3;
  static constexpr double kCoverage      = 1.96;
  static constexpr double kDefaultUpper  = kPosition1Mean + kCoverage * kPosition1Std;

  CtrModel() = default;
  /// Throws ConfigError unless 0 <= lower <= upper <= 1.
  CtrModel(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double sample(Rng &rng) const;

private:
  double lower_ = 0.0;
  double upper_ = kDefaultUpper;
};

inline double sample_ctr(CtrModel const &model, Rng &rng) { return model.sample(rng); }

/// One webpage view with its reproduced auction. `scores[i]` is the ad matched
/// to bidder i of `auction`; the top bidder holds `ground_truth_ad`.
struct SimulatedImpression
{
  std::string                  webpage_id;
  AuctionRecord                auction;
  std::vector<RawMetricRecord> scores;
  std::string                  ground_truth_ad;
};

/// Scores of every (webpage, ad) pair in a multimedia dataset, plus which ad
/// each webpage originally displayed.
class MetricTable
{
public:
  /// Throws ValidationError on a duplicate (webpage, ad) key or a second
  /// displayed ad for the same webpage.
  void insert(std::string const &webpage_id, RawMetricRecord record, bool displayed = false);

  std::size_t size() const { return records_.size(); }
  bool        empty() const { return records_.empty(); }

  RawMetricRecord const *find(std::string const &webpage_id, std::string const &ad_id) const;

  /// Webpages with a displayed ad, sorted by id.
  std::vector<std::string> webpages() const;
  std::string const       *displayed_ad(std::string const &webpage_id) const;
  /// Every record of the webpage except the displayed one, sorted by ad id.
  std::vector<RawMetricRecord> ad_pool(std::string const &webpage_id) const;

private:
  std::map<std::pair<std::string, std::string>, RawMetricRecord> records_;
  std::map<std::string, std::string>                             displayed_;
};

/// Reads `auctions.jsonl`. Blank lines are skipped; an empty file yields an
/// empty set and a warning. Throws ParseError or ValidationError with the
/// offending line.
std::vector<AuctionRecord> ingest_auctions(std::filesystem::path const &path,
                                           std::vector<std::string>    *warnings = nullptr);

/// Reads `metrics.jsonl`, range-checking every score.
MetricTable ingest_metrics(std::filesystem::path const &path, std::vector<std::string> *warnings = nullptr);

/// Reproduces one auction for a webpage: the ground-truth ad goes to the
/// highest bid, n - 1 ads are drawn from `ad_pool` without replacement and
/// matched to the remaining bids by a uniform permutation. Ads without a CTR
/// get one from `ctr_model`. Throws SamplingError if the pool is too small.
SimulatedImpression build_impression(std::string const              &webpage_id,
                                     RawMetricRecord const          &ground_truth_ad,
                                     AuctionRecord const            &auction,
                                     std::span<RawMetricRecord const> ad_pool,
                                     CtrModel const                 &ctr_model,
                                     Rng                            &rng);

/// One impression per webpage with a displayed ad; the auction for each is
/// drawn uniformly (with replacement) from `auctions`.
std::vector<SimulatedImpression> simulate_from_sources(std::span<AuctionRecord const> auctions,
                                                       MetricTable const             &metrics,
                                                       CtrModel const                &ctr_model,
                                                       std::uint64_t                  seed);

/// Parameters of a synthetic dataset.
struct SynthesisSpec
{
  std::size_t impressions = 0;
  std::size_t bidders_min = 2;
  std::size_t bidders_max = 10;
  /// Distinct ads available for sampling.
  std::size_t ad_pool = 2000;
  /// Bids are exp(N(bid_log_mean, bid_log_sigma^2)).
  double bid_log_mean  = 0.0;
  double bid_log_sigma = 0.5;
  /// Bids are rounded up to a multiple of this price tick; 0 keeps them
  /// continuous. Exchange bids cluster on price points, which produces ties.
  double bid_tick = 0.0;
  /// Private values are bid * (1 + U(0, value_markup)); 0 means truthful.
  /// With truthful bids the top bidder nearly always has the largest surplus,
  /// so no re-ranking can keep utility from falling.
  double value_markup = 3.0;
  double reserve  = 0.0;

  /// Throws ConfigError on inconsistent counts or distribution parameters.
  void validate() const;
};

/// Desk-scale stand-in for the proprietary logs: log-normal bids,
/// uniform memorability/relevance/saliency, CTRs from `ctr_model`. Impression z
/// draws from make_rng(seed, z + 1); the ad pool from make_rng(seed, 0).
std::vector<SimulatedImpression> synthesize_dataset(SynthesisSpec const &spec, std::uint64_t seed,
                                                    CtrModel const &ctr_model = {});

}  // namespace tsrtb
