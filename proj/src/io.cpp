#include "cxg/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cxg/error.hpp"

namespace cxg {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) fail(Errc::io, fmt::format("write to '{}' failed", path.string()));
}

std::string fixed(double value, int decimals) { return fmt::format("{:.{}f}", value, decimals); }

std::string exact(double value) { return fmt::format("{}", value); }

namespace {

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::format, fmt::format("field '{}': {}", key, e.what()));
  }
}

}  // namespace

json sample_to_json(const Sample& s) {
  return {{"sample_id", s.sample_id}, {"city_id", s.city_id}, {"country", s.country},
          {"month", s.month.str()},   {"tokens", s.tokens}};
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.sample_id = field<std::string>(j, "sample_id");
  s.city_id = field<std::string>(j, "city_id");
  s.country = field<std::string>(j, "country");
  s.month = Month::parse(field<std::string>(j, "month"));
  s.tokens = field<std::vector<std::string>>(j, "tokens");
  return s;
}

json annotated_to_json(const AnnotatedSample& s) {
  std::vector<std::string> tags;
  tags.reserve(s.tags.size());
  for (Pos p : s.tags) tags.emplace_back(pos_name(p));
  return {{"sample_id", s.sample_id}, {"city_id", s.city_id}, {"country", s.country},
          {"month", s.month.str()},   {"words", s.words},     {"tags", tags},
          {"domains", s.domains}};
}

AnnotatedSample annotated_from_json(const json& j) {
  AnnotatedSample s;
  s.sample_id = field<std::string>(j, "sample_id");
  s.city_id = field<std::string>(j, "city_id");
  s.country = field<std::string>(j, "country");
  s.month = Month::parse(field<std::string>(j, "month"));
  s.words = field<std::vector<std::int32_t>>(j, "words");
  s.domains = field<std::vector<std::int32_t>>(j, "domains");
  for (const std::string& t : field<std::vector<std::string>>(j, "tags")) {
    const auto p = parse_pos(t);
    if (!p) fail(Errc::tagset_violation, fmt::format("unknown tag '{}'", t));
    s.tags.push_back(*p);
  }
  if (s.tags.size() != s.words.size() || s.domains.size() != s.words.size()) {
    fail(Errc::format, fmt::format("annotated sample '{}' has ragged layers", s.sample_id));
  }
  return s;
}

std::vector<json> parse_jsonl(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      fail(Errc::format, fmt::format("line {}: {}", n, e.what()));
    }
  }
  return out;
}

json lexicon_to_json(const Lexicon& lexicon) {
  json words = json::array();
  for (const LexiconEntry& e : lexicon.entries()) words.push_back({e.word, e.count});
  return {{"size", lexicon.size()}, {"entries", words}};
}

Lexicon lexicon_from_json(const json& j) {
  std::vector<LexiconEntry> entries;
  for (const json& e : field<json>(j, "entries")) {
    entries.push_back({e.at(0).get<std::string>(), e.at(1).get<std::uint64_t>()});
  }
  return Lexicon(std::move(entries));
}

json domain_map_to_json(const DomainMap& map) {
  return {{"domain_count", map.domain_count()}, {"assignment", map.assignment()}};
}

DomainMap domain_map_from_json(const json& j, std::size_t domain_count) {
  const auto n = j.contains("domain_count") ? j.at("domain_count").get<std::size_t>() : domain_count;
  auto assignment = field<std::map<std::string, std::int32_t>>(j, "assignment");
  for (const auto& [w, d] : assignment) {
    if (d < 0 || static_cast<std::size_t>(d) >= n) fail(Errc::format, fmt::format("domain of '{}' out of range", w));
  }
  return DomainMap(std::move(assignment), n);
}

json grammar_to_json(const Grammar& grammar, const Lexicon* lexicon) {
  const Provenance& p = grammar.provenance();
  json constructions = json::array();
  for (const Construction& c : grammar.constructions()) {
    json slots = json::array();
    for (const SlotConstraint& s : c.slots) {
      json slot = {{"kind", slot_kind_name(s.kind)}};
      if (s.kind == SlotKind::syn) {
        slot["value"] = pos_name(static_cast<Pos>(s.value));
      } else {
        slot["value"] = s.value;
      }
      if (s.kind == SlotKind::lex && lexicon && static_cast<std::size_t>(s.value) < lexicon->size()) {
        slot["form"] = lexicon->word(s.value);
      }
      slots.push_back(slot);
    }
    constructions.push_back({{"slots", slots}, {"display", display(c, lexicon)}});
  }
  return {{"provenance",
           {{"corpus_id", p.corpus_id},
            {"config_hash", p.config_hash},
            {"max_slots", p.max_slots},
            {"inventory", {{"lex", p.inventory.lex}, {"syn", p.inventory.syn}, {"sem", p.inventory.sem}}}}},
          {"constructions", constructions}};
}

Grammar grammar_from_json(const json& j) {
  try {
    const json& pj = j.at("provenance");
    Provenance p;
    p.corpus_id = pj.at("corpus_id").get<std::string>();
    p.config_hash = pj.at("config_hash").get<std::string>();
    p.max_slots = pj.at("max_slots").get<std::size_t>();
    p.inventory.lex = pj.at("inventory").at("lex").get<std::size_t>();
    p.inventory.syn = pj.at("inventory").at("syn").get<std::size_t>();
    p.inventory.sem = pj.at("inventory").at("sem").get<std::size_t>();
    Grammar g(p);
    for (const json& cj : j.at("constructions")) {
      Construction c;
      for (const json& sj : cj.at("slots")) {
        const std::string kind = sj.at("kind").get<std::string>();
        SlotConstraint s;
        if (kind == "SYN") {
          s.kind = SlotKind::syn;
          const auto pos = parse_pos(sj.at("value").get<std::string>());
          if (!pos) fail(Errc::tagset_violation, "grammar uses an unknown tag");
          s.value = static_cast<std::int32_t>(*pos);
        } else if (kind == "LEX" || kind == "SEM") {
          s.kind = kind == "LEX" ? SlotKind::lex : SlotKind::sem;
          s.value = sj.at("value").get<std::int32_t>();
        } else {
          fail(Errc::format, fmt::format("unknown slot kind '{}'", kind));
        }
        c.slots.push_back(s);
      }
      g.add(std::move(c));
    }
    return g;
  } catch (const json::exception& e) {
    fail(Errc::format, fmt::format("bad grammar file: {}", e.what()));
  }
}

json plan_to_json(const SamplingPlan& plan) {
  return {{"quota", plan.quota},
          {"reference_period", {plan.reference_period.first.str(), plan.reference_period.last.str()}}};
}

SamplingPlan plan_from_json(const json& j) {
  SamplingPlan p;
  p.quota = field<std::map<std::string, std::size_t>>(j, "quota");
  const auto r = field<std::vector<std::string>>(j, "reference_period");
  if (r.size() != 2) fail(Errc::format, "reference_period needs two months");
  p.reference_period = {Month::parse(r[0]), Month::parse(r[1])};
  return p;
}

json splits_to_json(const Splits& splits) {
  json test = json::object();
  for (const auto& [m, ids] : splits.test) test[m.str()] = ids;
  json shortfalls = json::array();
  for (const Shortfall& s : splits.shortfalls) {
    shortfalls.push_back({{"city_id", s.city_id}, {"month", s.month.str()}, {"available", s.available}, {"quota", s.quota}});
  }
  return {{"train", splits.train}, {"test", test}, {"shortfalls", shortfalls}};
}

Splits splits_from_json(const json& j) {
  Splits s;
  s.train = field<std::vector<std::string>>(j, "train");
  const json test = field<json>(j, "test");
  for (const auto& [m, ids] : test.items()) {
    s.test[Month::parse(m)] = ids.get<std::vector<std::string>>();
  }
  for (const json& f : field<json>(j, "shortfalls")) {
    s.shortfalls.push_back({f.at("city_id").get<std::string>(), Month::parse(f.at("month").get<std::string>()),
                            f.at("available").get<std::size_t>(), f.at("quota").get<std::size_t>()});
  }
  return s;
}

std::string feature_csv(const FeatureTable& table, const std::string& value_column, const std::string& header_comment) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += fmt::format("sample_id,feature,{}\n", value_column);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const SparseVector& v = table.rows[r];
    for (std::size_t k = 0; k < v.nnz(); ++k) {
      out += fmt::format("{},{},{}\n", table.sample_ids[r], v.index[k], exact(v.value[k]));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

FeatureTable parse_feature_csv(const std::string& text, const std::vector<std::string>& sample_ids, std::size_t columns) {
  FeatureTable t;
  t.sample_ids = sample_ids;
  t.columns = columns;
  t.rows.resize(sample_ids.size());
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < sample_ids.size(); ++i) row_of.emplace(sample_ids[i], i);
  const auto rows = parse_csv(text);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != 3) fail(Errc::format, fmt::format("feature row {} has {} cells", r, cells.size()));
    auto it = row_of.find(cells[0]);
    if (it == row_of.end()) fail(Errc::reference, fmt::format("feature row for unknown sample '{}'", cells[0]));
    const auto f = static_cast<std::uint32_t>(std::stoul(cells[1]));
    if (f >= columns) fail(Errc::shape, fmt::format("feature {} outside {} columns", f, columns));
    SparseVector& v = t.rows[it->second];
    if (!v.index.empty() && v.index.back() >= f) fail(Errc::format, "feature rows must be sorted by index");
    v.index.push_back(f);
    v.value.push_back(std::stod(cells[2]));
  }
  return t;
}

std::string meta_csv(const std::vector<SampleMeta>& meta, const std::string& header_comment) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += "sample_id,country,city_id,month\n";
  for (const SampleMeta& m : meta) out += fmt::format("{},{},{},{}\n", m.sample_id, m.country, m.city_id, m.month.str());
  return out;
}

std::vector<SampleMeta> parse_meta_csv(const std::string& text) {
  std::vector<SampleMeta> out;
  const auto rows = parse_csv(text);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) fail(Errc::format, fmt::format("meta row {} has {} cells", r, rows[r].size()));
    out.push_back({rows[r][0], rows[r][1], rows[r][2], Month::parse(rows[r][3])});
  }
  return out;
}

}  // namespace cxg
