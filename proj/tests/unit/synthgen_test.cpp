#include <doctest.h>

#include <cmath>

#include "cxg/corpus.hpp"
#include "cxg/error.hpp"
#include "cxg/io.hpp"
#include "cxg/synthgen.hpp"
#include "support.hpp"

using namespace cxg;
using namespace cxg::testing;

namespace {

// Largest relative error between pooled realized template frequencies and
// the configured probabilities, over the cells of one dialect.
double max_relative_error(const GeneratorConfig& config, const std::string& dialect) {
  const SynthCorpus c = generate(config);
  std::vector<double> counts(config.templates.size(), 0.0);
  double total = 0.0;
  for (std::size_t d = 0; d < c.docs.size(); ++d) {
    if (c.docs[d].country != dialect) continue;
    for (std::uint32_t t : c.realized[d]) counts[t] += 1.0, total += 1.0;
  }
  std::vector<double> p;
  for (const CellTruth& cell : c.truth.cells) {
    if (cell.dialect == dialect) {
      p = cell.template_probabilities;
      break;
    }
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) worst = std::max(worst, std::abs(counts[t] / total - p[t]) / p[t]);
  return worst;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  const GeneratorConfig config = dialect_config({{"A", {{"heaps_adj", 2.0}}}, {"B", {}}}, 2, 4, 5, 42);
  const std::string a = corpus_jsonl(generate(config).docs, "h");
  const std::string b = corpus_jsonl(generate(config).docs, "h");
  CHECK(a == b);
  CHECK(ground_truth_json(generate(config).truth) == ground_truth_json(generate(config).truth));
  GeneratorConfig other = config;
  other.seed = 43;
  CHECK(corpus_jsonl(generate(other).docs, "h") != a);
}

TEST_CASE("generated corpus passes ingest") {
  const GeneratorConfig config = dialect_config({{"A", {}}, {"B", {}}}, 2, 4, 5, 1);
  const SynthCorpus c = generate(config);
  CorpusConfig cc;
  cc.countries = {"A", "B"};
  cc.train_range = {Month{2018, 7}, Month{2018, 8}};
  cc.test_range = {Month{2018, 9}, Month{2018, 10}};
  const IngestResult r = ingest_text(corpus_jsonl(c.docs, "h"), cc);
  CHECK(r.rejections.empty());
  REQUIRE(r.docs.size() == c.docs.size());
  for (std::size_t i = 0; i < c.docs.size(); ++i) CHECK(r.docs[i].tokens == c.docs[i].tokens);
  CHECK(c.truth.cells.size() == 2 * 2 * 4);
}

TEST_CASE("configuration validation") {
  GeneratorConfig config = dialect_config({{"A", {{"heaps_adj", 0.0}}}, {"B", {}}}, 2, 4, 5, 1);
  try {
    generate(config);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
  }
  config = dialect_config({{"A", {{"nope", 2.0}}}, {"B", {}}}, 2, 4, 5, 1);
  CHECK_THROWS_AS(generate(config), Error);
  config = dialect_config({{"A", {}}}, 2, 4, 5, 1);
  CHECK_THROWS_AS(generate(config), Error);
  config = dialect_config({{"A", {}}, {"B", {}}}, 2, 3, 5, 1);
  CHECK_THROWS_AS(generate(config), Error);
  config = dialect_config({{"A", {}}, {"B", {}}}, 2, 4, 5, 1);
  config.dialects[0].drift = {1.0, 1.0};
  CHECK_THROWS_AS(generate(config), Error);
}

TEST_CASE("drift injection") {
  GeneratorConfig config = dialect_config({{"A", {{"sweet_as", 3.0}}}, {"B", {}}}, 2, 36, 1, 1);
  const DialectProfile& base = config.dialects[0];
  const DialectProfile same = inject_drift(base, 1.0, 36);
  for (std::size_t m = 0; m < 36; ++m) {
    CHECK(cell_weights(config, same, base.cities[0], m) == cell_weights(config, base, base.cities[0], 0));
  }
  const DialectProfile drifted = inject_drift(base, 0.97, 36);
  CHECK(drifted.drift.size() == 36);
  CHECK(drifted.drift.front() == 0.97);
  CHECK(drifted.drift.back() == doctest::Approx(std::pow(0.97, 36)).epsilon(1e-14));
  CHECK(std::abs(drifted.drift.back() - 0.334) < 5e-4);
  CHECK_THROWS_AS(inject_drift(base, 0.0, 36), Error);
  CHECK_THROWS_AS(inject_drift(base, -1.0, 36), Error);

  std::size_t sweet = 0;
  for (std::size_t t = 0; t < config.templates.size(); ++t)
    if (config.templates[t].name == "sweet_as") sweet = t;
  const auto first = cell_weights(config, drifted, base.cities[0], 0);
  const auto last = cell_weights(config, drifted, base.cities[0], 35);
  CHECK(last[sweet] / first[sweet] == doctest::Approx(std::pow(0.97, 35)).epsilon(1e-14));
  CHECK(last[0] == first[0]);
}

TEST_CASE("empirical template frequencies converge") {
  GeneratorConfig small = dialect_config({{"A", {{"heaps_adj", 2.0}}}, {"B", {}}}, 10, 12, 30, 5);
  GeneratorConfig large = small;
  large.docs_per_cell = 300;
  const double e1 = max_relative_error(small, "A"), e10 = max_relative_error(large, "A");
  MESSAGE("max relative error " << e1 << " at 1x, " << e10 << " at 10x");
  CHECK(e10 <= 0.05);
  CHECK(e10 < e1);
}

TEST_CASE("city placement and blobs") {
  const auto cities = make_cities("XX", -30.0, 150.0, 40, 3.0, 9, 0.4);
  CHECK(cities.size() == 40);
  for (const SynthCity& c : cities) {
    CHECK(std::abs(c.lat + 30.0) <= 3.0);
    CHECK(std::abs(c.lon - 150.0) <= 3.0);
    CHECK(c.heterogeneity == (c.lon > 150.0 ? 0.4 : 1.0));
  }
  CHECK(cities[0].id == "XX-000");
  CHECK(make_cities("XX", -30.0, 150.0, 40, 3.0, 9, 0.4)[7].lat == cities[7].lat);
}

TEST_CASE("ground truth sidecar") {
  const GeneratorConfig config = dialect_config({{"A", {}}, {"B", {}}}, 1, 4, 2, 3);
  const SynthCorpus c = generate(config);
  const json j = json::parse(ground_truth_json(c.truth, "hdr"));
  CHECK(j["header"] == "hdr");
  CHECK(j["template_names"].size() == default_templates().size());
  CHECK(j["cells"].size() == 8);
  double s = 0.0;
  for (double v : j["cells"][0]["template_probabilities"]) s += v;
  CHECK(s == doctest::Approx(1.0));
}
