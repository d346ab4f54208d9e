#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"

namespace cxg {

// One slot of a generator template. LEX emits `value` verbatim; SYN draws a
// word of POS `value` from the shared inventory; SEM draws from the named
// semantic class.
struct TemplateSlot {
  SlotKind kind = SlotKind::syn;
  std::string value;
};

struct Template {
  std::string name;
  std::vector<TemplateSlot> slots;
  double base_weight = 1.0;
};

const std::vector<Template>& default_templates();
// Words per semantic class used by SEM slots.
const std::map<std::string, std::vector<std::string>>& semantic_classes();
// Open- and closed-class words per POS used by SYN slots.
const std::map<Pos, std::vector<std::string>>& syn_fillers();

struct SynthCity {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  double heterogeneity = 1.0;  // multiplies the dialect's marked template rates
};

struct DialectProfile {
  std::string label;
  // template name -> usage multiplier; templates not listed use 1.
  std::map<std::string, double> multipliers;
  // Per-month factor applied to the marked multipliers; empty means all ones.
  std::vector<double> drift;
  std::vector<SynthCity> cities;
};

struct GeneratorConfig {
  std::vector<DialectProfile> dialects;
  std::vector<Template> templates;
  Month start{2018, 7};
  std::size_t horizon = 12;
  std::size_t docs_per_cell = 20;
  std::size_t min_templates_per_doc = 3;
  std::size_t max_templates_per_doc = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CellTruth {
  std::string dialect;
  std::string city_id;
  Month month;
  std::vector<double> template_probabilities;  // aligned with config templates
};

struct GroundTruth {
  std::vector<std::string> template_names;
  std::vector<CellTruth> cells;
};

struct SynthCorpus {
  std::vector<GeoDoc> docs;
  GroundTruth truth;
  // Template index of every realization, per doc (for frequency checks).
  std::vector<std::vector<std::uint32_t>> realized;
};

SynthCorpus generate(const GeneratorConfig& config);

// Effective template weights for a (dialect, city, month offset) cell.
std::vector<double> cell_weights(const GeneratorConfig& config, const DialectProfile& dialect,
                                 const SynthCity& city, std::size_t month_offset);

// Geometric schedule rate^(m+1) for m in [0, horizon), ending at rate^horizon.
DialectProfile inject_drift(const DialectProfile& profile, double rate, std::size_t horizon);

// Cities scattered around a centre; `blob_contrast` < 1 lowers the
// heterogeneity multiplier of the eastern half, giving two spatial blobs.
std::vector<SynthCity> make_cities(const std::string& prefix, double lat, double lon,
                                   std::size_t count, double spread_deg, std::uint64_t seed,
                                   double blob_contrast = 1.0);

std::string corpus_jsonl(const std::vector<GeoDoc>& docs, const std::string& header_comment = {});
std::string ground_truth_json(const GroundTruth& truth, const std::string& header_comment = {});

}  // namespace cxg
