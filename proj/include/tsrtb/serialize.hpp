#pragma once

#include "tsrtb/evaluation.hpp"
#include "tsrtb/optimizer.hpp"
#include "tsrtb/reranker.hpp"
#include "tsrtb/simulation.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tsrtb {

/// Keys keep insertion order so output files are byte-stable.
using Json = nlohmann::ordered_json;

// Parsers throw std::invalid_argument on schema violations; ingestion wraps
// them into ParseError with the file location.

AuctionRecord auction_from_json(Json const &j);
Json          to_json(AuctionRecord const &auction);

struct MetricLine
{
  std::string     webpage_id;
  RawMetricRecord record;
  bool            displayed = false;
};

MetricLine metric_line_from_json(Json const &j);
Json       to_json(MetricLine const &line);

SimulatedImpression impression_from_json(Json const &j);
Json                to_json(SimulatedImpression const &impression);

Json to_json(WeightVector const &weights);
/// Undefined changes become null.
Json to_json(ChangeVector const &changes);
Json to_json(TradeoffConfig const &config);
Json to_json(OptimizationResult const &result);
Json to_json(RerankOutcome const &outcome);
Json to_json(DominanceEntry const &entry, std::vector<WeightVector> const &grid);
Json to_json(FoldReport const &fold);
Json to_json(FoldSummary const &summary);
Json to_json(SweepPoint const &point);
Json to_json(CorrelationReport const &report);

WeightVector   weights_from_json(Json const &j);
TradeoffConfig tradeoff_config_from_json(Json const &j);

/// Calls `fn(line_number, record)` for every non-blank line. Throws ParseError
/// on unreadable files or malformed JSON.
void for_each_jsonl(std::filesystem::path const                          &path,
                    std::function<void(std::size_t, Json const &)> const &fn);

void write_jsonl(std::filesystem::path const &path, std::span<Json const> records);
void write_json(std::filesystem::path const &path, Json const &document);
void write_text(std::filesystem::path const &path, std::string const &text);

std::vector<SimulatedImpression> read_impressions(std::filesystem::path const &path);

/// Writes auctions.jsonl, metrics.jsonl and impressions.jsonl into `dir`.
void write_dataset(std::filesystem::path const &dir, std::span<SimulatedImpression const> impressions);

/// Flat CSV mirrors for plotting tools.
std::string folds_csv(std::span<FoldReport const> folds, FoldSummary const &summary);
std::string sweep_csv(std::span<SweepPoint const> sweep);

}  // namespace tsrtb
