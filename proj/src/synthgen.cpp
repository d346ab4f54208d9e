#include "cxg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "cxg/annotate.hpp"
#include "cxg/error.hpp"
#include "cxg/io.hpp"
#include "cxg/rng.hpp"
#include "cxg/text.hpp"

namespace cxg {

namespace {

TemplateSlot lex(std::string w) { return {SlotKind::lex, std::move(w)}; }
TemplateSlot syn(std::string tag) { return {SlotKind::syn, std::move(tag)}; }
TemplateSlot sem(std::string cls) { return {SlotKind::sem, std::move(cls)}; }

}  // namespace

const std::vector<Template>& default_templates() {
  static const std::vector<Template> t = {
      {"noun_phrase", {syn("DET"), syn("ADJ"), syn("NOUN")}, 3.0},
      {"prep_phrase", {syn("ADP"), syn("DET"), syn("NOUN")}, 3.0},
      {"transitive", {syn("PRON"), syn("VERB"), syn("DET"), syn("NOUN")}, 2.5},
      {"aux_verb", {syn("PRON"), syn("AUX"), syn("VERB")}, 2.0},
      {"adv_adj", {syn("ADV"), syn("ADJ")}, 1.5},
      {"interjection", {syn("INTJ"), syn("PUNCT")}, 1.0},
      {"count_time", {syn("NUM"), sem("time")}, 1.0},
      {"eat_food", {lex("eat"), syn("DET"), sem("food")}, 1.0},
      {"go_place", {lex("go"), lex("to"), lex("the"), sem("place")}, 1.0},
      {"weather_is", {lex("the"), sem("weather"), lex("is"), syn("ADJ")}, 1.0},
      {"heaps_adj", {lex("heaps"), syn("ADJ")}, 0.6},
      {"sweet_as", {lex("sweet"), lex("as"), syn("PUNCT")}, 0.6},
      {"i_reckon", {lex("i"), lex("reckon"), syn("PRON")}, 0.6},
      {"bloody_noun", {lex("bloody"), syn("ADJ"), sem("food")}, 0.6},
      {"focus_on", {lex("focus"), lex("on"), lex("the"), sem("thing")}, 0.6},
      {"allow_to", {lex("allowing"), syn("PRON"), lex("to"), syn("VERB")}, 0.6},
      {"wanna_verb", {syn("PRON"), lex("wanna"), syn("VERB"), sem("place")}, 0.6},
      {"super_adj", {lex("super"), syn("ADJ"), lex("lol")}, 0.6},
  };
  return t;
}

const std::map<std::string, std::vector<std::string>>& semantic_classes() {
  static const std::map<std::string, std::vector<std::string>> c = {
      {"food", {"pie", "chips", "curry", "rice", "bread", "cheese", "pizza", "burger", "soup", "noodles"}},
      {"place", {"beach", "mall", "park", "gym", "office", "market", "library", "stadium", "airport", "club"}},
      {"time", {"days", "weeks", "months", "years", "hours", "minutes", "nights", "mornings"}},
      {"weather", {"rain", "wind", "sun", "snow", "storm", "heat", "fog", "frost"}},
      {"thing", {"game", "show", "music", "movie", "match", "news", "team", "song", "book", "party"}},
  };
  return c;
}

const std::map<Pos, std::vector<std::string>>& syn_fillers() {
  static const std::map<Pos, std::vector<std::string>> f = {
      {Pos::DET, {"the", "a", "this", "that", "every", "some", "another"}},
      {Pos::ADJ, {"good", "great", "big", "small", "new", "old", "nice", "cool", "hot", "cold", "funny", "crazy"}},
      {Pos::NOUN, {"car", "house", "dog", "phone", "friend", "road", "city", "school", "job", "idea", "family", "street"}},
      {Pos::ADP, {"in", "on", "at", "with", "from", "near", "behind", "under"}},
      {Pos::PRON, {"you", "he", "she", "we", "they", "it"}},
      {Pos::VERB, {"see", "make", "take", "find", "want", "need", "watch", "buy", "love", "hate"}},
      {Pos::AUX, {"can", "will", "should", "might", "could", "must"}},
      {Pos::ADV, {"very", "really", "too", "quite", "pretty", "totally"}},
      {Pos::INTJ, {"oh", "wow", "yeah", "hey", "ugh", "haha"}},
      {Pos::PUNCT, {"!", "."}},
      {Pos::NUM, {"two", "three", "four", "five", "ten"}},
  };
  return f;
}

void GeneratorConfig::validate() const {
  if (dialects.size() < 2) fail(Errc::config, "generator needs at least 2 dialects");
  if (horizon < 4) fail(Errc::config, "generator horizon must be at least 4 months");
  if (templates.empty()) fail(Errc::config, "generator needs templates");
  if (docs_per_cell == 0) fail(Errc::config, "docs_per_cell must be positive");
  if (min_templates_per_doc == 0 || min_templates_per_doc > max_templates_per_doc) {
    fail(Errc::config, "templates per doc must satisfy 1 <= min <= max");
  }
  std::set<std::string> names;
  for (const Template& t : templates) {
    if (!names.insert(t.name).second) fail(Errc::config, fmt::format("duplicate template '{}'", t.name));
    if (t.slots.empty()) fail(Errc::config, fmt::format("template '{}' has no slots", t.name));
    if (!(t.base_weight > 0.0) || !std::isfinite(t.base_weight)) {
      fail(Errc::config, fmt::format("template '{}' needs a positive base weight", t.name));
    }
    for (const TemplateSlot& s : t.slots) {
      if (s.kind == SlotKind::syn) {
        const auto pos = parse_pos(s.value);
        if (!pos || !syn_fillers().contains(*pos)) {
          fail(Errc::config, fmt::format("template '{}' uses unknown filler tag '{}'", t.name, s.value));
        }
      } else if (s.kind == SlotKind::sem && !semantic_classes().contains(s.value)) {
        fail(Errc::config, fmt::format("template '{}' uses unknown class '{}'", t.name, s.value));
      } else if (s.kind == SlotKind::lex && (s.value.empty() || tokenize(s.value) != std::vector<std::string>{s.value})) {
        fail(Errc::config, fmt::format("template '{}' has a non-token literal '{}'", t.name, s.value));
      }
    }
  }
  std::set<std::string> labels, cities;
  for (const DialectProfile& d : dialects) {
    if (!labels.insert(d.label).second) fail(Errc::config, fmt::format("duplicate dialect '{}'", d.label));
    if (d.cities.empty()) fail(Errc::config, fmt::format("dialect '{}' has no cities", d.label));
    for (const auto& [name, m] : d.multipliers) {
      if (!names.contains(name)) fail(Errc::config, fmt::format("dialect '{}' marks unknown template '{}'", d.label, name));
      if (!(m > 0.0) || !std::isfinite(m)) {
        fail(Errc::config, fmt::format("dialect '{}' multiplier for '{}' must be positive", d.label, name));
      }
    }
    if (!d.drift.empty() && d.drift.size() != horizon) {
      fail(Errc::config, fmt::format("dialect '{}' drift schedule has {} months, horizon is {}", d.label, d.drift.size(), horizon));
    }
    for (double v : d.drift) {
      if (!(v > 0.0) || !std::isfinite(v)) fail(Errc::config, fmt::format("dialect '{}' drift must be positive", d.label));
    }
    for (const SynthCity& c : d.cities) {
      if (!cities.insert(c.id).second) fail(Errc::config, fmt::format("duplicate city '{}'", c.id));
      if (!(c.heterogeneity > 0.0)) fail(Errc::config, fmt::format("city '{}' heterogeneity must be positive", c.id));
      if (c.lat < -90 || c.lat > 90 || c.lon < -180 || c.lon > 180) {
        fail(Errc::config, fmt::format("city '{}' coordinates out of range", c.id));
      }
    }
  }
}

std::vector<double> cell_weights(const GeneratorConfig& config, const DialectProfile& dialect,
                                 const SynthCity& city, std::size_t month_offset) {
  const double drift = dialect.drift.empty() ? 1.0 : dialect.drift.at(month_offset);
  std::vector<double> w;
  w.reserve(config.templates.size());
  for (const Template& t : config.templates) {
    auto it = dialect.multipliers.find(t.name);
    w.push_back(it == dialect.multipliers.end() ? t.base_weight
                                                : t.base_weight * it->second * drift * city.heterogeneity);
  }
  return w;
}

DialectProfile inject_drift(const DialectProfile& profile, double rate, std::size_t horizon) {
  if (!(rate > 0.0) || !std::isfinite(rate)) fail(Errc::config, "drift rate must be positive");
  DialectProfile out = profile;
  out.drift.resize(horizon);
  for (std::size_t m = 0; m < horizon; ++m) out.drift[m] = std::pow(rate, static_cast<double>(m + 1));
  return out;
}

std::vector<SynthCity> make_cities(const std::string& prefix, double lat, double lon, std::size_t count,
                                   double spread_deg, std::uint64_t seed, double blob_contrast) {
  Rng rng(seed, fnv1a(prefix));
  std::vector<SynthCity> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SynthCity c;
    c.id = fmt::format("{}-{:03d}", prefix, i);
    c.lat = std::clamp(lat + (2.0 * rng.uniform() - 1.0) * spread_deg, -89.0, 89.0);
    c.lon = std::clamp(lon + (2.0 * rng.uniform() - 1.0) * spread_deg, -179.0, 179.0);
    c.heterogeneity = c.lon > lon ? blob_contrast : 1.0;
    out.push_back(c);
  }
  return out;
}

SynthCorpus generate(const GeneratorConfig& config) {
  config.validate();
  SynthCorpus out;
  for (const Template& t : config.templates) out.truth.template_names.push_back(t.name);
  const auto& fill_syn = syn_fillers();
  const auto& fill_sem = semantic_classes();
  for (const DialectProfile& d : config.dialects) {
    for (const SynthCity& city : d.cities) {
      for (std::size_t m = 0; m < config.horizon; ++m) {
        const Month month = config.start + static_cast<int>(m);
        const std::vector<double> w = cell_weights(config, d, city, m);
        CellTruth truth{d.label, city.id, month, w};
        double total = 0.0;
        for (double v : w) total += v;
        for (double& v : truth.template_probabilities) v /= total;
        out.truth.cells.push_back(std::move(truth));

        Rng rng(config.seed, fnv1a(fmt::format("{}|{}|{}", d.label, city.id, month.str())));
        const std::size_t span = config.max_templates_per_doc - config.min_templates_per_doc + 1;
        for (std::size_t n = 0; n < config.docs_per_cell; ++n) {
          GeoDoc doc;
          doc.city_id = city.id;
          doc.country = d.label;
          doc.lat = city.lat;
          doc.lon = city.lon;
          doc.month = month;
          doc.doc_id = fmt::format("{}-{}-{:05d}", city.id, month.str(), n);
          std::vector<std::uint32_t> used;
          const std::size_t count = config.min_templates_per_doc + rng.below(span);
          for (std::size_t r = 0; r < count; ++r) {
            const std::size_t ti = rng.categorical(w);
            used.push_back(static_cast<std::uint32_t>(ti));
            for (const TemplateSlot& s : config.templates[ti].slots) {
              if (s.kind == SlotKind::lex) {
                doc.tokens.push_back(s.value);
              } else if (s.kind == SlotKind::syn) {
                const auto& words = fill_syn.at(*parse_pos(s.value));
                doc.tokens.push_back(words[rng.below(words.size())]);
              } else {
                const auto& words = fill_sem.at(s.value);
                doc.tokens.push_back(words[rng.below(words.size())]);
              }
            }
          }
          out.docs.push_back(std::move(doc));
          out.realized.push_back(std::move(used));
        }
      }
    }
  }
  return out;
}

std::string corpus_jsonl(const std::vector<GeoDoc>& docs, const std::string& header_comment) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  for (const GeoDoc& d : docs) {
    std::string text;
    for (const std::string& t : d.tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    const json j = {{"doc_id", d.doc_id}, {"city_id", d.city_id}, {"country", d.country}, {"lat", d.lat},
                    {"lon", d.lon},       {"month", d.month.str()}, {"text", text}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string ground_truth_json(const GroundTruth& truth, const std::string& header_comment) {
  json cells = json::array();
  for (const CellTruth& c : truth.cells) {
    cells.push_back({{"dialect", c.dialect},
                     {"city_id", c.city_id},
                     {"month", c.month.str()},
                     {"template_probabilities", c.template_probabilities}});
  }
  json doc = {{"template_names", truth.template_names}, {"cells", cells}};
  if (!header_comment.empty()) doc["header"] = header_comment;
  return doc.dump(1) + "\n";
}

}  // namespace cxg
