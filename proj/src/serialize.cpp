#include "tsrtb/serialize.hpp"

#include "tsrtb/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tsrtb {

namespace {

void require(bool ok, std::string const &what)
{
  if (!ok)
  {
    throw std::invalid_argument(what);
  }
}

std::string string_field(Json const &j, char const *key)
{
  require(j.contains(key), std::string("missing field '") + key + "'");
  require(j[key].is_string(), std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

double number_field(Json const &j, char const *key)
{
  require(j.contains(key), std::string("missing field '") + key + "'");
  require(j[key].is_number(), std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::optional<double> optional_number(Json const &j, char const *key)
{
  if (!j.contains(key) || j[key].is_null())
  {
    return std::nullopt;
  }
  require(j[key].is_number(), std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

Json optional_to_json(std::optional<double> const &x)
{
  return x ? Json(*x) : Json(nullptr);
}

MetricVector metric_vector_from_json(Json const &j, char const *what)
{
  require(j.is_array() && j.size() == kMetricCount, std::string(what) + " must be an array of six numbers");
  MetricVector v{};
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    require(j[k].is_number(), std::string(what) + " must be an array of six numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

Json metric_vector_json(MetricVector const &v)
{
  return Json(std::vector<double>(v.begin(), v.end()));
}

RawMetricRecord record_from_json(Json const &j)
{
  RawMetricRecord r;
  r.ad_id        = string_field(j, "ad_id");
  r.memorability = optional_number(j, "memorability");
  r.ctr          = optional_number(j, "ctr");
  r.relevance    = optional_number(j, "relevance");
  r.saliency     = optional_number(j, "saliency");
  return r;
}

void put_record(Json &j, RawMetricRecord const &r)
{
  j["ad_id"]        = r.ad_id;
  j["memorability"] = optional_to_json(r.memorability);
  j["ctr"]          = optional_to_json(r.ctr);
  j["relevance"]    = optional_to_json(r.relevance);
  j["saliency"]     = optional_to_json(r.saliency);
}

}  // namespace

AuctionRecord auction_from_json(Json const &j)
{
  require(j.is_object(), "auction record must be an object");
  AuctionRecord a;
  a.auction_id = string_field(j, "auction_id");
  require(j.contains("bids") && j["bids"].is_array(), "field 'bids' must be an array");
  for (auto const &entry : j["bids"])
  {
    require(entry.is_array() && entry.size() == 2 && entry[0].is_string() && entry[1].is_number(),
            "each bid must be [advertiser_id, amount]");
    auto const amount = entry[1].get<double>();
    a.bids.push_back({entry[0].get<std::string>(), amount, amount});
  }
  if (j.contains("values") && !j["values"].is_null())
  {
    auto const &values = j["values"];
    require(values.is_array() && values.size() == a.bids.size(), "field 'values' must match 'bids' in length");
    for (std::size_t i = 0; i < a.bids.size(); ++i)
    {
      require(values[i].is_number(), "field 'values' must hold numbers");
      a.bids[i].value = values[i].get<double>();
    }
  }
  a.reserve = optional_number(j, "reserve").value_or(0.0);
  return a;
}

Json to_json(AuctionRecord const &auction)
{
  Json j;
  j["auction_id"] = auction.auction_id;
  Json bids       = Json::array();
  Json values     = Json::array();
  for (auto const &b : auction.bids)
  {
    bids.push_back(Json::array({b.advertiser_id, b.amount}));
    values.push_back(b.value);
  }
  j["bids"]    = std::move(bids);
  j["values"]  = std::move(values);
  j["reserve"] = auction.reserve;
  return j;
}

MetricLine metric_line_from_json(Json const &j)
{
  require(j.is_object(), "metric record must be an object");
  MetricLine line;
  line.webpage_id = string_field(j, "webpage_id");
  line.record     = record_from_json(j);
  if (j.contains("displayed"))
  {
    require(j["displayed"].is_boolean(), "field 'displayed' must be a boolean");
    line.displayed = j["displayed"].get<bool>();
  }
  return line;
}

Json to_json(MetricLine const &line)
{
  Json j;
  j["webpage_id"] = line.webpage_id;
  put_record(j, line.record);
  j["displayed"] = line.displayed;
  return j;
}

SimulatedImpression impression_from_json(Json const &j)
{
  require(j.is_object(), "impression record must be an object");
  SimulatedImpression imp;
  imp.webpage_id      = string_field(j, "webpage_id");
  imp.ground_truth_ad = string_field(j, "ground_truth_ad");
  require(j.contains("auction"), "missing field 'auction'");
  imp.auction = auction_from_json(j["auction"]);
  require(j.contains("ads") && j["ads"].is_array() && j["ads"].size() == imp.auction.size(),
          "field 'ads' must hold one record per bid");
  for (auto const &ad : j["ads"])
  {
    require(ad.is_object(), "ad record must be an object");
    imp.scores.push_back(record_from_json(ad));
  }
  return imp;
}

Json to_json(SimulatedImpression const &impression)
{
  Json j;
  j["webpage_id"]      = impression.webpage_id;
  j["ground_truth_ad"] = impression.ground_truth_ad;
  j["auction"]         = to_json(impression.auction);
  Json ads             = Json::array();
  for (std::size_t i = 0; i < impression.scores.size(); ++i)
  {
    Json ad;
    ad["advertiser_id"] = impression.auction.bids[i].advertiser_id;
    put_record(ad, impression.scores[i]);
    ads.push_back(std::move(ad));
  }
  j["ads"] = std::move(ads);
  return j;
}

Json to_json(WeightVector const &weights)
{
  return metric_vector_json(weights.values());
}

Json to_json(ChangeVector const &changes)
{
  Json j = Json::array();
  for (auto const &x : changes.xi)
  {
    j.push_back(optional_to_json(x));
  }
  return j;
}

Json to_json(TradeoffConfig const &config)
{
  Json j;
  j["theta"]     = metric_vector_json(config.theta);
  j["grid_step"] = config.grid_step;
  return j;
}

Json to_json(OptimizationResult const &result)
{
  Json j;
  j["infeasible"]     = result.infeasible;
  j["weights"]        = result.weights ? to_json(*result.weights) : Json(nullptr);
  j["objective"]      = result.objective;
  j["train_xi"]       = to_json(result.train_changes);
  j["feasible_count"] = result.feasible_count;
  j["grid_size"]      = result.grid_size;
  return j;
}

Json to_json(RerankOutcome const &o)
{
  Json j;
  j["auction_id"]              = o.auction_id;
  j["selected_advertiser"]     = o.selected_advertiser;
  j["selected_ad"]             = o.selected_ad;
  j["ground_truth_advertiser"] = o.ground_truth_advertiser;
  j["ground_truth_ad"]         = o.ground_truth_ad;
  j["changed"]                 = o.changed();
  j["selected_x"]              = metric_vector_json(o.selected_x);
  j["ground_truth_x"]          = metric_vector_json(o.ground_truth_x);
  j["selected_score"]          = o.selected_score;
  j["ground_truth_score"]      = o.ground_truth_score;
  j["payment"]                 = o.payment;
  return j;
}

Json to_json(DominanceEntry const &entry, std::vector<WeightVector> const &grid)
{
  Json j;
  j["ad_id"]          = entry.ad_id;
  j["advertiser_id"]  = entry.advertiser_id;
  j["classification"] = std::string(to_string(entry.classification));
  if (!entry.dominated_by.empty())
  {
    j["dominated_by"] = entry.dominated_by;
  }
  j["winning_count"] = entry.winning_points.size();
  Json points        = Json::array();
  for (auto g : entry.winning_points)
  {
    points.push_back(to_json(grid[g]));
  }
  j["winning_points"] = std::move(points);
  return j;
}

Json to_json(FoldReport const &fold)
{
  Json j;
  j["fold"]                = fold.fold;
  j["train_size"]          = fold.train_size;
  j["test_size"]           = fold.test_size;
  j["infeasible"]          = fold.infeasible;
  j["feasible_count"]      = fold.feasible_count;
  j["weights"]             = fold.weights ? to_json(*fold.weights) : Json(nullptr);
  j["train_xi"]            = to_json(fold.train_changes);
  j["test_xi"]             = to_json(fold.test_changes);
  j["train_objective"]     = fold.train_objective;
  j["test_objective"]      = fold.test_objective;
  j["test_violates_theta"] = fold.test_violates_theta;
  return j;
}

namespace {

Json stats_json(ColumnStats const &s)
{
  Json j;
  Json mean = Json::array();
  Json sd   = Json::array();
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    mean.push_back(optional_to_json(s.mean[k]));
    sd.push_back(optional_to_json(s.std[k]));
  }
  j["mean"] = std::move(mean);
  j["std"]  = std::move(sd);
  return j;
}

}  // namespace

Json to_json(FoldSummary const &summary)
{
  Json j;
  j["train"]                = stats_json(summary.train);
  j["test"]                 = stats_json(summary.test);
  j["mean_train_objective"] = optional_to_json(summary.mean_train_objective);
  j["mean_test_objective"]  = optional_to_json(summary.mean_test_objective);
  j["infeasible_folds"]     = summary.infeasible_folds;
  return j;
}

Json to_json(SweepPoint const &point)
{
  Json j;
  j["theta1"]           = point.theta1;
  j["infeasible_count"] = point.infeasible_count;
  Json folds            = Json::array();
  for (auto const &f : point.folds)
  {
    folds.push_back(to_json(f));
  }
  j["folds"]   = std::move(folds);
  j["summary"] = to_json(point.summary);
  return j;
}

Json to_json(CorrelationReport const &report)
{
  Json j;
  j["samples"] = report.samples;
  Json names   = Json::array();
  for (auto kind : kAllMetrics)
  {
    names.push_back(std::string(metric_name(kind)));
  }
  j["metrics"] = std::move(names);
  Json matrix  = Json::array();
  for (auto const &row : report.r)
  {
    Json r = Json::array();
    for (auto const &x : row)
    {
      r.push_back(optional_to_json(x));
    }
    matrix.push_back(std::move(r));
  }
  j["r"] = std::move(matrix);
  return j;
}

WeightVector weights_from_json(Json const &j)
{
  try
  {
    return WeightVector(metric_vector_from_json(j, "weights"));
  }
  catch (std::invalid_argument const &e)
  {
    throw ConfigError(e.what());
  }
}

TradeoffConfig tradeoff_config_from_json(Json const &j)
{
  TradeoffConfig c;
  try
  {
    if (j.contains("theta"))
    {
      c.theta = metric_vector_from_json(j["theta"], "theta");
    }
    if (j.contains("theta1"))
    {
      c.theta[0] = number_field(j, "theta1");
    }
    if (j.contains("grid_step"))
    {
      c.grid_step = number_field(j, "grid_step");
    }
  }
  catch (std::invalid_argument const &e)
  {
    throw ConfigError(e.what());
  }
  return c;
}

void for_each_jsonl(std::filesystem::path const &path, std::function<void(std::size_t, Json const &)> const &fn)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open " + path.string());
  }
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line))
  {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    Json j;
    try
    {
      j = Json::parse(line);
    }
    catch (nlohmann::json::parse_error const &e)
    {
      throw ParseError(path.string(), number, e.what());
    }
    fn(number, j);
  }
}

void write_text(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
}

void write_jsonl(std::filesystem::path const &path, std::span<Json const> records)
{
  std::string text;
  for (auto const &r : records)
  {
    text += r.dump();
    text += '\n';
  }
  write_text(path, text);
}

void write_json(std::filesystem::path const &path, Json const &document)
{
  write_text(path, document.dump(2) + "\n");
}

std::vector<SimulatedImpression> read_impressions(std::filesystem::path const &path)
{
  if (!std::filesystem::exists(path))
  {
    throw ConfigError("input file not found: " + path.string());
  }
  std::vector<SimulatedImpression> out;
  for_each_jsonl(path, [&](std::size_t line, Json const &j) {
    try
    {
      auto imp = impression_from_json(j);
      validate(imp.auction);
      for (auto const &s : imp.scores)
      {
        validate(s);
      }
      out.push_back(std::move(imp));
    }
    catch (std::invalid_argument const &e)
    {
      throw ParseError(path.string(), line, e.what());
    }
    catch (nlohmann::json::exception const &e)
    {
      throw ParseError(path.string(), line, e.what());
    }
    catch (Error const &e)
    {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void write_dataset(std::filesystem::path const &dir, std::span<SimulatedImpression const> impressions)
{
  std::filesystem::create_directories(dir);
  std::vector<Json> auctions;
  std::vector<Json> metrics;
  std::vector<Json> records;
  for (auto const &imp : impressions)
  {
    auctions.push_back(to_json(imp.auction));
    for (auto const &s : imp.scores)
    {
      metrics.push_back(to_json(MetricLine{imp.webpage_id, s, s.ad_id == imp.ground_truth_ad}));
    }
    records.push_back(to_json(imp));
  }
  write_jsonl(dir / "auctions.jsonl", auctions);
  write_jsonl(dir / "metrics.jsonl", metrics);
  write_jsonl(dir / "impressions.jsonl", records);
}

namespace {

std::string cell(std::optional<double> const &x)
{
  if (!x)
  {
    return "";
  }
  std::ostringstream os;
  os << std::setprecision(10) << *x;
  return os.str();
}

std::string cell(double x)
{
  return cell(std::optional<double>(x));
}

void fold_row(std::ostringstream &os, std::string const &label, FoldReport const &f)
{
  os << label << ',' << (f.infeasible ? 1 : 0);
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',' << (f.weights ? cell((*f.weights)[k]) : "");
  }
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',' << cell(f.train_changes[k]);
  }
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',' << cell(f.test_changes[k]);
  }
  os << ',' << cell(f.train_objective) << ',' << cell(f.test_objective) << '\n';
}

void stats_row(std::ostringstream &os, std::string const &label, FoldSummary const &s, bool mean)
{
  os << label << ',';
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',';
  }
  auto const &train = mean ? s.train.mean : s.train.std;
  auto const &test  = mean ? s.test.mean : s.test.std;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',' << cell(train[k]);
  }
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    os << ',' << cell(test[k]);
  }
  if (mean)
  {
    os << ',' << cell(s.mean_train_objective) << ',' << cell(s.mean_test_objective);
  }
  else
  {
    os << ",,";
  }
  os << '\n';
}

std::string fold_header(std::string const &prefix)
{
  std::string h = prefix + "fold,infeasible";
  for (int k = 1; k <= 6; ++k)
  {
    h += ",w" + std::to_string(k);
  }
  for (int k = 1; k <= 6; ++k)
  {
    h += ",train_xi" + std::to_string(k);
  }
  for (int k = 1; k <= 6; ++k)
  {
    h += ",test_xi" + std::to_string(k);
  }
  return h + ",train_objective,test_objective\n";
}

}  // namespace

std::string folds_csv(std::span<FoldReport const> folds, FoldSummary const &summary)
{
  std::ostringstream os;
  os << fold_header("");
  for (auto const &f : folds)
  {
    fold_row(os, std::to_string(f.fold + 1), f);
  }
  stats_row(os, "Mean", summary, true);
  stats_row(os, "Std", summary, false);
  return os.str();
}

std::string sweep_csv(std::span<SweepPoint const> sweep)
{
  std::ostringstream os;
  os << fold_header("theta1,");
  for (auto const &p : sweep)
  {
    for (auto const &f : p.folds)
    {
      os << cell(p.theta1) << ',';
      fold_row(os, std::to_string(f.fold + 1), f);
    }
    os << cell(p.theta1) << ',';
    stats_row(os, "Mean", p.summary, true);
    os << cell(p.theta1) << ',';
    stats_row(os, "Std", p.summary, false);
  }
  return os.str();
}

}  // namespace tsrtb
