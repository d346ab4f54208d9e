#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxg/annotate.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"
#include "cxg/models.hpp"
#include "cxg/parser.hpp"

namespace cxg {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
// Creates parent directories. Raises Errc::io on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

// Fixed-precision decimal with trailing zeros kept ("%.*f").
std::string fixed(double value, int decimals);
// Shortest round-trip representation.
std::string exact(double value);

json sample_to_json(const Sample& s);
Sample sample_from_json(const json& j);
json annotated_to_json(const AnnotatedSample& s);
AnnotatedSample annotated_from_json(const json& j);

// One JSON object per line; '#' lines are skipped.
std::vector<json> parse_jsonl(const std::string& text);

json lexicon_to_json(const Lexicon& lexicon);
Lexicon lexicon_from_json(const json& j);

// word -> integer domain
json domain_map_to_json(const DomainMap& map);
DomainMap domain_map_from_json(const json& j, std::size_t domain_count);

json grammar_to_json(const Grammar& grammar, const Lexicon* lexicon = nullptr);
Grammar grammar_from_json(const json& j);

json plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const json& j);
json splits_to_json(const Splits& splits);
Splits splits_from_json(const json& j);

// Triplet rows "sample_id,feature,value" for non-zero entries.
struct FeatureTable {
  std::vector<std::string> sample_ids;
  std::vector<SparseVector> rows;
  std::size_t columns = 0;
};

struct SampleMeta {
  std::string sample_id;
  std::string country;
  std::string city_id;
  Month month;
};

std::string feature_csv(const FeatureTable& table, const std::string& value_column,
                        const std::string& header_comment = {});
// Column count must be given; the file lists only non-zero cells.
FeatureTable parse_feature_csv(const std::string& text, const std::vector<std::string>& sample_ids,
                               std::size_t columns);
std::string meta_csv(const std::vector<SampleMeta>& meta, const std::string& header_comment = {});
std::vector<SampleMeta> parse_meta_csv(const std::string& text);

// Minimal CSV reader for files this tool writes (no quoted commas).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace cxg
