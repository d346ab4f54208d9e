#include "cxg/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <fmt/format.h>

#include "cxg/error.hpp"

namespace cxg {

bool match_at(const Construction& c, const AnnotatedSample& s, std::size_t i) {
  if (i + c.size() > s.size()) {
    fail(Errc::precondition,
         fmt::format("construction of length {} at {} exceeds sample of {}", c.size(), i, s.size()));
  }
  for (std::size_t j = 0; j < c.size(); ++j) {
    const std::int32_t v = slot_value(s, i + j, c.slots[j].kind);
    if (v == kOov || v != c.slots[j].value) return false;
  }
  return true;
}

GrammarIndex::GrammarIndex(const Grammar& grammar) : grammar_(&grammar) {
  for (std::size_t id = 0; id < grammar.size(); ++id) {
    const SlotConstraint& first = grammar.at(id).slots.front();
    auto& bucket = first.kind == SlotKind::lex ? lex_ : first.kind == SlotKind::syn ? syn_ : sem_;
    const auto v = static_cast<std::size_t>(first.value);
    if (bucket.size() <= v) bucket.resize(v + 1);
    bucket[v].push_back(static_cast<std::uint32_t>(id));
  }
}

FeatureVector count(const Grammar& grammar, const AnnotatedSample& s) {
  FeatureVector fv{s.sample_id, s.city_id, s.country, s.month,
                   std::vector<std::uint32_t>(grammar.size(), 0)};
  if (grammar.empty()) return fv;
  const GrammarIndex index(grammar);
  for (std::size_t i = 0; i < s.size(); ++i) {
    index.for_each_match(s, i, [&](std::uint32_t id) { ++fv.counts[id]; });
  }
  return fv;
}

EncodingCosts EncodingCosts::for_grammar(std::size_t grammar_size, std::size_t lexicon_size) {
  return {std::log2(static_cast<double>(grammar_size) + 1.0),
          std::log2(static_cast<double>(lexicon_size) + 1.0)};
}

MatchLists collect_matches(const GrammarIndex& index, const Grammar& grammar,
                           const AnnotatedSample& s) {
  MatchLists out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    index.for_each_match(s, i, [&](std::uint32_t id) {
      out[i].push_back({id, static_cast<std::uint32_t>(grammar.at(id).size())});
    });
    std::sort(out[i].begin(), out[i].end(),
              [](const MatchEntry& a, const MatchEntry& b) { return a.construction < b.construction; });
  }
  return out;
}

namespace {

constexpr std::uint32_t kResidualStep = std::numeric_limits<std::uint32_t>::max();

struct BeamState {
  std::uint32_t uses = 0;
  std::uint32_t residuals = 0;
  std::uint32_t step = kResidualStep;  // construction id of the last step
  std::size_t prev_pos = 0;
  std::size_t prev_index = 0;
  double cost = 0.0;
};

bool state_before(const BeamState& a, const BeamState& b) {
  return std::tie(a.cost, a.residuals, a.step) < std::tie(b.cost, b.residuals, b.step);
}

// Sorts, drops (uses, residuals) duplicates and dominated states, and truncates.
void finalize(std::vector<BeamState>& beam, std::size_t width) {
  std::sort(beam.begin(), beam.end(), state_before);
  std::vector<BeamState> kept;
  kept.reserve(std::min(beam.size(), width));
  for (const BeamState& s : beam) {
    if (kept.size() >= width) break;
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const BeamState& k) {
      return k.uses <= s.uses && k.residuals <= s.residuals;
    });
    if (!dominated) kept.push_back(s);
  }
  beam = std::move(kept);
}

}  // namespace

Encoding encode_matches(const MatchLists& matches, const EncodingCosts& costs,
                        std::size_t beam_width) {
  if (beam_width == 0) fail(Errc::config, "beam width must be at least 1");
  const std::size_t n = matches.size();
  std::vector<std::vector<BeamState>> beams(n + 1);
  beams[0].push_back({});
  for (std::size_t p = 0; p < n; ++p) {
    finalize(beams[p], beam_width);
    for (std::size_t k = 0; k < beams[p].size(); ++k) {
      const BeamState& s = beams[p][k];
      BeamState r{s.uses, s.residuals + 1, kResidualStep, p, k, 0.0};
      r.cost = costs.cost(r.uses, r.residuals);
      beams[p + 1].push_back(r);
      for (const MatchEntry& m : matches[p]) {
        if (p + m.length > n) continue;
        BeamState c{s.uses + 1, s.residuals, m.construction, p, k, 0.0};
        c.cost = costs.cost(c.uses, c.residuals);
        beams[p + m.length].push_back(c);
      }
    }
  }
  finalize(beams[n], beam_width);

  Encoding enc;
  const BeamState& best = beams[n].front();
  enc.cost = best.cost;
  std::size_t pos = n, index = 0;
  while (pos > 0) {
    const BeamState& s = beams[pos][index];
    if (s.step == kResidualStep) {
      enc.residuals.push_back(s.prev_pos);
    } else {
      enc.spans.push_back({s.prev_pos, s.step});
    }
    pos = s.prev_pos;
    index = s.prev_index;
  }
  std::reverse(enc.spans.begin(), enc.spans.end());
  std::reverse(enc.residuals.begin(), enc.residuals.end());
  return enc;
}

Encoding encode_sample(const Grammar& grammar, const AnnotatedSample& s, std::size_t beam_width) {
  const EncodingCosts costs =
      EncodingCosts::for_grammar(grammar.size(), grammar.provenance().inventory.lex);
  const GrammarIndex index(grammar);
  return encode_matches(collect_matches(index, grammar, s), costs, beam_width);
}

}  // namespace cxg
