#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cxg/month.hpp"

namespace cxg {

// One geo-referenced document (a tweet, in the original setting).
struct GeoDoc {
  std::vector<std::string> tokens;
  std::string city_id;
  std::string country;
  double lat = 0.0;
  double lon = 0.0;
  Month month;
  std::string doc_id;
};

// Fixed-size aggregate of documents from one city and one month.
struct Sample {
  std::vector<std::string> tokens;
  std::string city_id;
  std::string country;
  Month month;
  std::string sample_id;
};

struct CorpusConfig {
  std::set<std::string> countries;
  MonthRange train_range;
  MonthRange test_range;
  std::size_t target_words = 500;
  std::uint64_t seed = 0;

  // Smallest range covering both periods; documents outside it are rejected.
  MonthRange date_range() const;
};

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct IngestResult {
  std::vector<GeoDoc> docs;
  std::vector<Rejection> rejections;
};

// Reads the JSON-Lines corpus. Lines starting with '#' are header comments.
IngestResult ingest(const std::filesystem::path& path, const CorpusConfig& config);
// Same as ingest() over an in-memory JSON-Lines buffer.
IngestResult ingest_text(const std::string& jsonl, const CorpusConfig& config);

struct CityInfo {
  std::string country;
  double lat = 0.0;
  double lon = 0.0;
};

// city_id -> location, from the first document seen for each city.
std::map<std::string, CityInfo> city_table(const std::vector<GeoDoc>& docs);

struct GroupKey {
  std::string city_id;
  Month month;
  auto operator<=>(const GroupKey&) const = default;
};

struct Aggregation {
  std::vector<Sample> samples;
  // Tokens left over at the end of each (city, month) group.
  std::map<GroupKey, std::size_t> discarded;
};

Aggregation aggregate(const std::vector<GeoDoc>& docs, std::size_t target_words = 500);

struct SamplingPlan {
  std::map<std::string, std::size_t> quota;
  MonthRange reference_period;
};

SamplingPlan fix_distribution(const std::vector<Sample>& samples, const MonthRange& reference);

struct Shortfall {
  std::string city_id;
  Month month;
  std::size_t available = 0;
  std::size_t quota = 0;
  bool operator==(const Shortfall&) const = default;
};

struct Splits {
  std::vector<std::string> train;
  std::map<Month, std::vector<std::string>> test;
  std::vector<Shortfall> shortfalls;
};

Splits split(const std::vector<Sample>& samples, const SamplingPlan& plan,
             const MonthRange& train_range, const MonthRange& test_range,
             std::uint64_t seed);

}  // namespace cxg
