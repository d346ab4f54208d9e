#include "cxg/manifest.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/io.hpp"
#include "cxg/text.hpp"

namespace cxg {

std::string Manifest::header() const { return fmt::format("manifest={} seed={}", hash, seed); }

namespace {

MonthRange range_of(const json& j, const char* key) {
  if (!j.contains(key)) fail(Errc::config, fmt::format("manifest lacks '{}'", key));
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2) fail(Errc::config, fmt::format("'{}' must be [first, last]", key));
  return MonthRange::parse(r.at(0).get<std::string>(), r.at(1).get<std::string>());
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <class T>
void read(const json& j, const char* key, T& dest) {
  if (j.contains(key)) dest = j.at(key).get<T>();
}

GeneratorConfig synth_config(const json& j, std::uint64_t seed) {
  GeneratorConfig g;
  g.templates = default_templates();
  g.seed = j.value("seed", seed);
  if (j.contains("start")) g.start = Month::parse(j.at("start").get<std::string>());
  read(j, "horizon", g.horizon);
  read(j, "docs_per_cell", g.docs_per_cell);
  read(j, "min_templates_per_doc", g.min_templates_per_doc);
  read(j, "max_templates_per_doc", g.max_templates_per_doc);
  if (!j.contains("dialects")) fail(Errc::config, "synth block lacks 'dialects'");
  for (const json& dj : j.at("dialects")) {
    DialectProfile d;
    d.label = dj.at("label").get<std::string>();
    read(dj, "multipliers", d.multipliers);
    const json& cj = dj.at("cities");
    d.cities = make_cities(cj.value("prefix", d.label), cj.at("lat").get<double>(), cj.at("lon").get<double>(),
                           cj.at("count").get<std::size_t>(), cj.value("spread", 2.0), g.seed,
                           cj.value("blob_contrast", 1.0));
    if (dj.contains("drift")) d = inject_drift(d, dj.at("drift").get<double>(), g.horizon);
    g.dialects.push_back(std::move(d));
  }
  g.validate();
  return g;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  Manifest m;
  m.hash = hex64(fnv1a(text));
  try {
    const json j = json::parse(text);
    m.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("countries")) fail(Errc::config, "manifest lacks 'countries'");
    for (const auto& c : j.at("countries")) m.corpus.countries.insert(c.get<std::string>());
    if (m.corpus.countries.size() < 2) fail(Errc::config, "manifest needs at least 2 countries");
    m.corpus.train_range = range_of(j, "train_range");
    m.corpus.test_range = range_of(j, "test_range");
    if (m.corpus.train_range.overlaps(m.corpus.test_range)) fail(Errc::config, "train and test ranges overlap");
    m.corpus.target_words = j.value("target_words", std::size_t{500});
    if (m.corpus.target_words == 0) fail(Errc::config, "target_words must be positive");
    m.corpus.seed = m.seed;

    if (!j.contains("paths")) fail(Errc::config, "manifest lacks 'paths'");
    const json& p = j.at("paths");
    m.corpus_path = resolve(base_dir, p.at("corpus").get<std::string>());
    m.output_dir = resolve(base_dir, p.at("output_dir").get<std::string>());
    if (p.contains("vectors")) m.vectors_path = resolve(base_dir, p.at("vectors").get<std::string>());

    if (j.contains("annotate")) {
      const json& a = j.at("annotate");
      read(a, "lexicon_cap", m.annotate.lexicon_cap);
      read(a, "domains", m.annotate.domains);
      read(a, "vector_dim", m.annotate.vector_dim);
      read(a, "window", m.annotate.window);
      read(a, "power_iterations", m.annotate.power_iterations);
      read(a, "kmeans_iterations", m.annotate.kmeans_iterations);
    }
    if (m.annotate.domains == 0 || m.annotate.vector_dim == 0 || m.annotate.lexicon_cap == 0) {
      fail(Errc::config, "annotate sizes must be positive");
    }

    m.induce.seed = m.seed;
    if (j.contains("induce")) {
      const json& a = j.at("induce");
      read(a, "theta", m.induce.theta);
      read(a, "max_slots", m.induce.max_slots);
      read(a, "beam_width", m.induce.beam_width);
    }
    if (m.induce.max_slots < 2 || m.induce.beam_width == 0) fail(Errc::config, "induce needs max_slots >= 2, beam_width >= 1");

    std::vector<Condition> conditions;
    if (j.contains("models")) {
      const json& a = j.at("models");
      if (a.contains("featurizers")) {
        m.models.featurizers.clear();
        for (const auto& f : a.at("featurizers")) m.models.featurizers.push_back(parse_featurizer(f.get<std::string>()));
      }
      read(a, "c_grid", m.models.c_grid);
      read(a, "dev_months", m.models.dev_months);
      read(a, "tolerance", m.models.tolerance);
      read(a, "top_n", m.models.top_n);
      if (a.contains("conditions")) {
        for (const auto& [name, list] : a.at("conditions").items()) {
          if (name == "all") fail(Errc::config, "condition name 'all' is reserved");
          Condition c{name, list.get<std::vector<std::string>>()};
          std::sort(c.countries.begin(), c.countries.end());
          for (const std::string& country : c.countries) {
            if (!m.corpus.countries.contains(country)) {
              fail(Errc::config, fmt::format("condition '{}' names unknown country '{}'", name, country));
            }
          }
          conditions.push_back(std::move(c));
        }
      }
    }
    if (m.models.dev_months == 0 || static_cast<int>(m.models.dev_months) >= m.corpus.train_range.size()) {
      fail(Errc::config, "dev_months must leave at least one training month");
    }
    m.models.conditions.push_back({"all", {m.corpus.countries.begin(), m.corpus.countries.end()}});
    for (Condition& c : conditions) m.models.conditions.push_back(std::move(c));

    if (j.contains("temporal")) {
      read(j.at("temporal"), "alpha", m.temporal.alpha);
      read(j.at("temporal"), "vecm_lag", m.temporal.vecm_lag);
    }
    if (j.contains("spatial")) {
      const json& a = j.at("spatial");
      if (a.contains("featurizer")) m.spatial.featurizer = parse_featurizer(a.at("featurizer").get<std::string>());
      read(a, "condition", m.spatial.condition);
      read(a, "k", m.spatial.k);
      read(a, "permutations", m.spatial.permutations);
    }
    if (j.contains("synth")) {
      m.synth.present = true;
      m.synth.generator = synth_config(j.at("synth"), m.seed);
      const std::string truth = j.at("synth").value("truth", "");
      m.synth.truth = truth.empty() ? std::filesystem::path(m.corpus_path.string() + ".truth.json")
                                    : resolve(base_dir, truth);
    }
  } catch (const json::exception& e) {
    fail(Errc::config, fmt::format("manifest: {}", e.what()));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Manifest m = parse_manifest(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
  m.file = path;
  return m;
}

}  // namespace cxg
