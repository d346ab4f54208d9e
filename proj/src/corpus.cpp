#include "cxg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cxg/error.hpp"
#include "cxg/rng.hpp"
#include "cxg/text.hpp"

namespace cxg {

MonthRange CorpusConfig::date_range() const {
  return {std::min(train_range.first, test_range.first),
          std::max(train_range.last, test_range.last)};
}

namespace {

std::optional<std::string> validate_record(const nlohmann::json& j, const CorpusConfig& config,
                                           GeoDoc& doc) {
  if (!j.is_object()) return "record is not an object";
  for (const char* key : {"text", "city_id", "country", "month", "doc_id"}) {
    if (!j.contains(key) || !j[key].is_string()) return fmt::format("missing string field '{}'", key);
  }
  for (const char* key : {"lat", "lon"}) {
    if (!j.contains(key) || !j[key].is_number()) return fmt::format("missing numeric field '{}'", key);
  }
  doc.tokens = tokenize(j["text"].get<std::string>());
  if (doc.tokens.empty()) return "empty text";
  doc.city_id = j["city_id"].get<std::string>();
  doc.doc_id = j["doc_id"].get<std::string>();
  if (doc.city_id.empty() || doc.doc_id.empty()) return "empty identifier";
  doc.country = j["country"].get<std::string>();
  if (!config.countries.contains(doc.country)) {
    return fmt::format("country '{}' not in manifest", doc.country);
  }
  doc.lat = j["lat"].get<double>();
  doc.lon = j["lon"].get<double>();
  if (doc.lat < -90.0 || doc.lat > 90.0 || doc.lon < -180.0 || doc.lon > 180.0) {
    return "coordinates out of range";
  }
  try {
    doc.month = Month::parse(j["month"].get<std::string>());
  } catch (const Error& e) {
    return std::string(e.what());
  }
  if (!config.date_range().contains(doc.month)) {
    return fmt::format("month {} outside manifest range", doc.month.str());
  }
  return std::nullopt;
}

}  // namespace

IngestResult ingest_text(const std::string& jsonl, const CorpusConfig& config) {
  IngestResult result;
  std::set<std::string> seen;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    GeoDoc doc;
    std::optional<std::string> problem;
    try {
      problem = validate_record(nlohmann::json::parse(line), config, doc);
    } catch (const nlohmann::json::exception& e) {
      problem = fmt::format("malformed JSON: {}", e.what());
    }
    if (!problem && !seen.insert(doc.doc_id).second) {
      problem = fmt::format("duplicate doc_id '{}'", doc.doc_id);
    }
    if (problem) {
      result.rejections.push_back({lineno, *problem});
      continue;
    }
    result.docs.push_back(std::move(doc));
  }
  if (result.docs.empty()) {
    fail(Errc::empty_corpus,
         fmt::format("no valid records ({} rejected)", result.rejections.size()));
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& path, const CorpusConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot read corpus '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Errc::io, fmt::format("error reading '{}'", path.string()));
  return ingest_text(buf.str(), config);
}

std::map<std::string, CityInfo> city_table(const std::vector<GeoDoc>& docs) {
  std::map<std::string, CityInfo> out;
  for (const GeoDoc& d : docs) out.try_emplace(d.city_id, CityInfo{d.country, d.lat, d.lon});
  return out;
}

Aggregation aggregate(const std::vector<GeoDoc>& docs, std::size_t target_words) {
  if (target_words == 0) fail(Errc::config, "target_words must be positive");
  std::map<GroupKey, std::vector<const GeoDoc*>> groups;
  for (const GeoDoc& d : docs) groups[{d.city_id, d.month}].push_back(&d);

  Aggregation out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const GeoDoc* a, const GeoDoc* b) { return a->doc_id < b->doc_id; });
    Sample current;
    std::size_t index = 0;
    for (const GeoDoc* d : members) {
      current.tokens.insert(current.tokens.end(), d->tokens.begin(), d->tokens.end());
      if (current.tokens.size() >= target_words) {
        current.city_id = key.city_id;
        current.country = d->country;
        current.month = key.month;
        current.sample_id = fmt::format("{}/{}/{:04d}", key.city_id, key.month.str(), index++);
        out.samples.push_back(std::move(current));
        current = Sample{};
      }
    }
    if (!current.tokens.empty()) out.discarded[key] = current.tokens.size();
  }
  return out;
}

SamplingPlan fix_distribution(const std::vector<Sample>& samples, const MonthRange& reference) {
  std::map<std::string, std::map<Month, std::size_t>> counts;
  for (const Sample& s : samples) {
    if (reference.contains(s.month)) ++counts[s.city_id][s.month];
  }
  SamplingPlan plan;
  plan.reference_period = reference;
  for (const auto& [city, per_month] : counts) {
    if (per_month.size() != static_cast<std::size_t>(reference.size())) continue;
    std::size_t quota = per_month.begin()->second;
    for (const auto& [m, n] : per_month) quota = std::min(quota, n);
    plan.quota[city] = std::max<std::size_t>(quota, 1);
  }
  if (plan.quota.empty()) {
    fail(Errc::empty_plan, fmt::format("no city has samples in every month of {}..{}",
                                       reference.first.str(), reference.last.str()));
  }
  return plan;
}

Splits split(const std::vector<Sample>& samples, const SamplingPlan& plan,
             const MonthRange& train_range, const MonthRange& test_range, std::uint64_t seed) {
  if (train_range.overlaps(test_range)) {
    fail(Errc::config, fmt::format("train range {}..{} overlaps test range {}..{}",
                                   train_range.first.str(), train_range.last.str(),
                                   test_range.first.str(), test_range.last.str()));
  }
  Splits out;
  std::map<GroupKey, std::vector<std::string>> cells;
  for (const Sample& s : samples) {
    if (train_range.contains(s.month)) out.train.push_back(s.sample_id);
    if (test_range.contains(s.month)) cells[{s.city_id, s.month}].push_back(s.sample_id);
  }
  std::sort(out.train.begin(), out.train.end());

  for (Month m = test_range.first; m <= test_range.last; m = m + 1) {
    std::vector<std::string>& chosen = out.test[m];
    for (const auto& [city, quota] : plan.quota) {
      auto it = cells.find({city, m});
      std::vector<std::string> pool = it == cells.end() ? std::vector<std::string>{} : it->second;
      std::sort(pool.begin(), pool.end());
      if (pool.size() < quota) {
        out.shortfalls.push_back({city, m, pool.size(), quota});
        chosen.insert(chosen.end(), pool.begin(), pool.end());
        continue;
      }
      // Partial Fisher-Yates: the first `quota` slots become the draw.
      Rng rng(seed, fnv1a(city + "|" + m.str()));
      for (std::size_t i = 0; i < quota; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      }
      pool.resize(quota);
      std::sort(pool.begin(), pool.end());
      chosen.insert(chosen.end(), pool.begin(), pool.end());
    }
    std::sort(chosen.begin(), chosen.end());
  }
  return out;
}

}  // namespace cxg
