#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "cxg/annotate.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"
#include "cxg/induction.hpp"
#include "cxg/models.hpp"
#include "cxg/parser.hpp"
#include "cxg/rng.hpp"
#include "cxg/synthgen.hpp"

namespace cxg::testing {

inline AnnotatedSample random_sample(Rng& rng, std::size_t len, const InventorySizes& sizes, double oov = 0.1) {
  AnnotatedSample s;
  s.sample_id = "r";
  for (std::size_t i = 0; i < len; ++i) {
    const bool out = rng.uniform() < oov;
    s.words.push_back(out ? kOov : static_cast<std::int32_t>(rng.below(sizes.lex)));
    s.tags.push_back(static_cast<Pos>(rng.below(kPosCount)));
    s.domains.push_back(out ? kOov : static_cast<std::int32_t>(rng.below(sizes.sem)));
  }
  return s;
}

// Constructions built from windows of `source` so that matches actually occur.
inline Grammar random_grammar(Rng& rng, const InventorySizes& sizes, std::size_t count, std::size_t max_slots,
                              const std::vector<AnnotatedSample>& source) {
  Grammar g(Provenance{"test", "test", max_slots, sizes});
  std::set<Construction> seen;
  for (std::size_t attempt = 0; g.size() < count && attempt < count * 20; ++attempt) {
    const std::size_t len = 2 + rng.below(max_slots - 1);
    Construction c;
    const AnnotatedSample& s = source[rng.below(source.size())];
    const bool windowed = s.size() >= len && rng.uniform() < 0.7;
    const std::size_t start = windowed ? rng.below(s.size() - len + 1) : 0;
    for (std::size_t j = 0; j < len; ++j) {
      SlotKind k = static_cast<SlotKind>(rng.below(3));
      std::int32_t v;
      if (windowed) {
        v = slot_value(s, start + j, k);
        if (v == kOov) k = SlotKind::syn, v = slot_value(s, start + j, k);
      } else {
        v = static_cast<std::int32_t>(rng.below(sizes.of(k)));
      }
      c.slots.push_back({k, v});
    }
    if (seen.insert(c).second) g.add(c);
  }
  return g;
}

// Direct per-construction, per-position comparison of every slot.
inline std::vector<std::uint32_t> brute_count(const Grammar& g, const AnnotatedSample& s) {
  std::vector<std::uint32_t> out(g.size(), 0);
  for (std::size_t id = 0; id < g.size(); ++id) {
    const Construction& c = g.at(id);
    for (std::size_t i = 0; i + c.size() <= s.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < c.size() && ok; ++j) {
        const SlotConstraint& k = c.slots[j];
        std::int32_t actual = 0;
        switch (k.kind) {
          case SlotKind::lex: actual = s.words[i + j]; break;
          case SlotKind::syn: actual = static_cast<std::int32_t>(s.tags[i + j]); break;
          case SlotKind::sem: actual = s.domains[i + j]; break;
        }
        ok = actual != kOov && actual == k.value;
      }
      if (ok) ++out[id];
    }
  }
  return out;
}

// Exhaustive set of reachable (uses, residuals) pairs per prefix; minimum cost at the end.
inline double dp_min_cost(const Grammar& g, const AnnotatedSample& s) {
  const std::size_t n = s.size();
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> reach(n + 1);
  reach[0].insert({0, 0});
  for (std::size_t p = 0; p < n; ++p) {
    for (const auto& [u, r] : reach[p]) {
      reach[p + 1].insert({u, r + 1});
      for (std::size_t id = 0; id < g.size(); ++id) {
        const Construction& c = g.at(id);
        if (p + c.size() > n) continue;
        bool ok = true;
        for (std::size_t j = 0; j < c.size() && ok; ++j) {
          const std::int32_t actual = slot_value(s, p + j, c.slots[j].kind);
          ok = actual != kOov && actual == c.slots[j].value;
        }
        if (ok) reach[p + c.size()].insert({u + 1, r});
      }
    }
  }
  const double cg = std::log2(static_cast<double>(g.size()) + 1.0);
  const double cr = std::log2(static_cast<double>(g.provenance().inventory.lex) + 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [u, r] : reach[n]) best = std::min(best, static_cast<double>(u) * cg + static_cast<double>(r) * cr);
  return best;
}

struct HandOls {
  std::vector<double> beta, se, t;
  std::vector<double> residuals;
};

// Normal equations solved by Gauss-Jordan elimination; rows of x are observations.
inline HandOls hand_ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = x.size(), k = x.front().size();
  std::vector<std::vector<double>> a(k, std::vector<double>(2 * k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < n; ++r) a[i][j] += x[r][i] * x[r][j];
    for (std::size_t r = 0; r < n; ++r) a[i][2 * k] += x[r][i] * y[r];
    a[i][k + i] = 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (double& v : a[c]) v /= d;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j <= 2 * k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  HandOls out;
  for (std::size_t i = 0; i < k; ++i) out.beta.push_back(a[i][2 * k]);
  double rss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double fit = 0.0;
    for (std::size_t i = 0; i < k; ++i) fit += x[r][i] * out.beta[i];
    out.residuals.push_back(y[r] - fit);
    rss += (y[r] - fit) * (y[r] - fit);
  }
  const double s2 = rss / static_cast<double>(n - k);
  for (std::size_t i = 0; i < k; ++i) {
    out.se.push_back(std::sqrt(s2 * a[i][k + i]));
    out.t.push_back(out.beta[i] / out.se.back());
  }
  return out;
}

// ADF t statistic with intercept and one lagged difference.
inline double hand_adf(const std::vector<double>& u) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (std::size_t t = 2; t < u.size(); ++t) {
    x.push_back({1.0, u[t - 1], u[t - 1] - u[t - 2]});
    y.push_back(u[t] - u[t - 1]);
  }
  return hand_ols(x, y).t[1];
}

inline std::vector<double> random_walk(Rng& rng, std::size_t n, double step = 1.0) {
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) out[t] = out[t - 1] + step * rng.normal();
  return out;
}

struct PipelineOptions {
  MonthRange train{Month{2018, 7}, Month{2018, 9}};
  MonthRange test{Month{2018, 10}, Month{2019, 9}};
  std::size_t target_words = 100;
  std::size_t lexicon_cap = 5000;
  std::size_t domains = 24;
  std::size_t vector_dim = 20;
  InductionConfig induce{};
  std::uint64_t seed = 0;
};

struct PipelineRun {
  SynthCorpus synth;
  std::vector<Sample> samples;
  Splits splits;
  Lexicon lexicon;
  DomainMap domains;
  std::vector<AnnotatedSample> annotated;  // aligned with samples
  std::vector<AnnotatedSample> train;
  InventorySizes sizes;
  InductionResult induced;
  std::map<std::string, std::size_t> index;  // sample id -> position in samples
};

inline PipelineRun run_through_induction(const GeneratorConfig& config, const PipelineOptions& opt) {
  PipelineRun run;
  run.synth = generate(config);
  const Aggregation agg = aggregate(run.synth.docs, opt.target_words);
  run.samples = agg.samples;
  const SamplingPlan plan = fix_distribution(run.samples, opt.train);
  run.splits = split(run.samples, plan, opt.train, opt.test, opt.seed);
  for (std::size_t i = 0; i < run.samples.size(); ++i) run.index.emplace(run.samples[i].sample_id, i);
  std::vector<Sample> train;
  for (const std::string& id : run.splits.train) train.push_back(run.samples[run.index.at(id)]);
  run.lexicon = build_lexicon(train, opt.lexicon_cap);
  const VectorTable vectors = ppmi_svd_vectors(train, run.lexicon, {2, opt.vector_dim, 30, opt.seed});
  run.domains = induce_domains(vectors, std::min(opt.domains, vectors.size()), opt.seed);
  const LookupTagger tagger;
  for (const Sample& s : run.samples) run.annotated.push_back(annotate(s, run.lexicon, tagger, run.domains));
  for (const std::string& id : run.splits.train) run.train.push_back(run.annotated[run.index.at(id)]);
  run.sizes = {run.lexicon.size(), kPosCount, run.domains.domain_count()};
  InductionConfig ic = opt.induce;
  ic.seed = opt.seed;
  run.induced = induce(run.train, run.sizes, ic);
  return run;
}

// Dialects with given template multipliers, each with `cities` cities.
inline GeneratorConfig dialect_config(const std::vector<std::pair<std::string, std::map<std::string, double>>>& dialects,
                                      std::size_t cities, std::size_t horizon, std::size_t docs_per_cell,
                                      std::uint64_t seed) {
  GeneratorConfig g;
  g.templates = default_templates();
  g.horizon = horizon;
  g.docs_per_cell = docs_per_cell;
  g.seed = seed;
  double lon = -120.0;
  for (const auto& [label, mult] : dialects) {
    DialectProfile d;
    d.label = label;
    d.multipliers = mult;
    d.cities = make_cities(label, 40.0, lon, cities, 2.0, seed);
    lon += 30.0;
    g.dialects.push_back(std::move(d));
  }
  return g;
}

// Domains taken straight from the generator's semantic classes; every other
// lexicon word shares one extra domain.
inline DomainMap class_domains(const Lexicon& lexicon) {
  std::map<std::string, std::int32_t> m;
  std::int32_t d = 0;
  for (const auto& [name, words] : semantic_classes()) {
    for (const auto& w : words) m[w] = d;
    ++d;
  }
  std::map<std::string, std::int32_t> out;
  for (const auto& e : lexicon.entries()) {
    auto it = m.find(e.word);
    out[e.word] = it == m.end() ? d : it->second;
  }
  return DomainMap(out, static_cast<std::size_t>(d) + 1);
}

// Construction equivalent to a template whose SEM slots name generator classes.
inline Construction template_construction(const Template& t, const Lexicon& lexicon) {
  Construction c;
  std::map<std::string, std::int32_t> cls;
  for (const auto& [name, words] : semantic_classes()) cls.emplace(name, static_cast<std::int32_t>(cls.size()));
  for (const TemplateSlot& s : t.slots) {
    switch (s.kind) {
      case SlotKind::lex: c.slots.push_back({SlotKind::lex, lexicon.id(s.value)}); break;
      case SlotKind::syn: c.slots.push_back({SlotKind::syn, static_cast<std::int32_t>(*parse_pos(s.value))}); break;
      case SlotKind::sem: c.slots.push_back({SlotKind::sem, cls.at(s.value)}); break;
    }
  }
  return c;
}

struct LabeledSamples {
  std::vector<Sample> samples;
  Lexicon lexicon;
  DomainMap domains;
  std::vector<AnnotatedSample> annotated;
};

inline LabeledSamples synth_samples(const GeneratorConfig& config, std::size_t target_words) {
  LabeledSamples out;
  const SynthCorpus corpus = generate(config);
  out.samples = aggregate(corpus.docs, target_words).samples;
  out.lexicon = build_lexicon(out.samples, 100000);
  out.domains = class_domains(out.lexicon);
  const LookupTagger tagger;
  for (const Sample& s : out.samples) out.annotated.push_back(annotate(s, out.lexicon, tagger, out.domains));
  return out;
}

inline SparseVector cxg_features(const Grammar& g, const AnnotatedSample& s) {
  SparseVector v = to_sparse(count(g, s).counts);
  normalize(v, Normalization::l1);
  return v;
}

}  // namespace cxg::testing
