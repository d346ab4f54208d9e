#include "cxg/induction.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/text.hpp"

namespace cxg {

double delta_p(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  if (a + b == 0 || c + d == 0) {
    fail(Errc::undefined_association,
         fmt::format("empty margin in contingency ({}, {}, {}, {})", a, b, c, d));
  }
  return static_cast<double>(a) / static_cast<double>(a + b) -
         static_cast<double>(c) / static_cast<double>(c + d);
}

AssociationTable::AssociationTable(const std::vector<AnnotatedSample>& corpus,
                                   const InventorySizes& sizes) {
  for (std::size_t k = 0; k < kSlotKinds; ++k) {
    const std::size_t n = sizes.of(static_cast<SlotKind>(k)) + 1;
    first_[k].assign(n, 0);
    second_[k].assign(n, 0);
  }
  auto bump = [](std::vector<std::uint64_t>& m, std::int32_t v) {
    const auto idx = static_cast<std::size_t>(v + 1);
    if (idx >= m.size()) m.resize(idx + 1, 0);
    ++m[idx];
  };
  std::array<std::int32_t, kSlotKinds> left{}, right{};
  for (const AnnotatedSample& s : corpus) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      ++total_;
      for (std::size_t k = 0; k < kSlotKinds; ++k) {
        left[k] = slot_value(s, i, static_cast<SlotKind>(k));
        right[k] = slot_value(s, i + 1, static_cast<SlotKind>(k));
        bump(first_[k], left[k]);
        bump(second_[k], right[k]);
      }
      for (std::size_t a = 0; a < kSlotKinds; ++a)
        for (std::size_t b = 0; b < kSlotKinds; ++b) ++joint_[a * kSlotKinds + b][key(left[a], right[b])];
    }
  }
}

std::uint64_t AssociationTable::margin(const std::vector<std::uint64_t>& m, std::int32_t v) const {
  const auto idx = static_cast<std::size_t>(v + 1);
  return idx < m.size() ? m[idx] : 0;
}

Contingency AssociationTable::counts(SlotConstraint first, SlotConstraint second) const {
  const auto& joint = joint_[level(first.kind, second.kind)];
  auto it = joint.find(key(first.value, second.value));
  const std::uint64_t a = it == joint.end() ? 0 : it->second;
  const std::uint64_t cue = margin(first_[static_cast<std::size_t>(first.kind)], first.value);
  const std::uint64_t outcome = margin(second_[static_cast<std::size_t>(second.kind)], second.value);
  return {a, cue - a, outcome - a, total_ - cue - outcome + a};
}

std::optional<double> AssociationTable::forward(SlotConstraint first, SlotConstraint second) const {
  const Contingency c = counts(first, second);
  if (c.a + c.b == 0 || c.c + c.d == 0) return std::nullopt;
  return delta_p(c.a, c.b, c.c, c.d);
}

std::size_t AssociationTable::distinct_pairs(SlotKind first, SlotKind second) const {
  return joint_[level(first, second)].size();
}

AssociationTable build_association(const std::vector<AnnotatedSample>& corpus,
                                   const InventorySizes& sizes) {
  return AssociationTable(corpus, sizes);
}

double Candidate::score() const {
  return static_cast<double>(support) * std::abs(mean_delta_p);
}

namespace {

struct Partial {
  std::vector<SlotKind> kinds;
  double score = 0.0;
  double min_dp = std::numeric_limits<double>::infinity();
};

bool partial_before(const Partial& a, const Partial& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.kinds < b.kinds;
}

void available_kinds(const AnnotatedSample& s, std::size_t p, std::vector<SlotKind>& out) {
  out.clear();
  if (s.words[p] != kOov) out.push_back(SlotKind::lex);
  out.push_back(SlotKind::syn);
  if (s.domains[p] != kOov) out.push_back(SlotKind::sem);
}

struct ConstructionHash {
  std::size_t operator()(const Construction& c) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const SlotConstraint& s : c.slots) {
      h ^= (static_cast<std::uint64_t>(s.kind) << 32) ^ static_cast<std::uint32_t>(s.value);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<std::optional<SpanChoice>> best_span_choices(const AnnotatedSample& s,
                                                         std::size_t start,
                                                         const AssociationTable& table,
                                                         std::size_t max_slots,
                                                         std::size_t beam_width) {
  if (beam_width == 0) fail(Errc::config, "beam width must be at least 1");
  std::vector<std::optional<SpanChoice>> out(max_slots + 1);
  if (start >= s.size()) return out;
  std::vector<SlotKind> kinds;
  std::vector<Partial> beam, next;
  available_kinds(s, start, kinds);
  for (SlotKind k : kinds) beam.push_back({{k}, 0.0, std::numeric_limits<double>::infinity()});
  std::sort(beam.begin(), beam.end(), partial_before);
  if (beam.size() > beam_width) beam.resize(beam_width);

  for (std::size_t len = 2; len <= max_slots && start + len <= s.size(); ++len) {
    const std::size_t p = start + len - 1;
    available_kinds(s, p, kinds);
    next.clear();
    for (const Partial& part : beam) {
      const SlotKind prev = part.kinds.back();
      const SlotConstraint cue{prev, slot_value(s, p - 1, prev)};
      for (SlotKind k : kinds) {
        const auto dp = table.forward(cue, {k, slot_value(s, p, k)});
        if (!dp) continue;
        Partial ext = part;
        ext.kinds.push_back(k);
        ext.score += *dp;
        ext.min_dp = std::min(ext.min_dp, *dp);
        next.push_back(std::move(ext));
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end(), partial_before);
    if (next.size() > beam_width) next.resize(beam_width);
    beam.swap(next);
    out[len] = SpanChoice{beam.front().kinds, beam.front().score, beam.front().min_dp};
  }
  return out;
}

std::vector<Candidate> generate_candidates(const std::vector<AnnotatedSample>& corpus,
                                           const AssociationTable& table,
                                           const CandidateConfig& config) {
  std::unordered_map<Construction, Candidate, ConstructionHash> merged;
  Construction c;
  for (const AnnotatedSample& s : corpus) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const auto choices = best_span_choices(s, i, table, config.max_slots, config.beam_width);
      for (std::size_t len = 2; len < choices.size(); ++len) {
        if (!choices[len] || choices[len]->min_delta_p < config.theta) continue;
        c.slots.clear();
        for (std::size_t j = 0; j < len; ++j) {
          const SlotKind k = choices[len]->kinds[j];
          c.slots.push_back({k, slot_value(s, i + j, k)});
        }
        auto [it, fresh] = merged.try_emplace(c);
        if (fresh) {
          it->second.construction = c;
          it->second.mean_delta_p = choices[len]->score / static_cast<double>(len - 1);
        }
        ++it->second.support;
      }
    }
  }
  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (auto& [key, cand] : merged) out.push_back(std::move(cand));
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    const double sa = a.score(), sb = b.score();
    if (sa != sb) return sa > sb;
    return a.construction < b.construction;
  });
  return out;
}

namespace {

struct SlotTally {
  std::size_t constructions = 0;
  std::size_t lex = 0, syn = 0, sem = 0;

  void add(const Construction& c) {
    ++constructions;
    for (const SlotConstraint& s : c.slots) {
      (s.kind == SlotKind::lex ? lex : s.kind == SlotKind::syn ? syn : sem) += 1;
    }
  }
  double bits(const Provenance& p) const {
    const auto lg = [](std::size_t n) { return n == 0 ? 0.0 : std::log2(static_cast<double>(n)); };
    const auto slots = static_cast<double>(lex + syn + sem);
    return slots * std::log2(3.0) + static_cast<double>(lex) * lg(p.inventory.lex) +
           static_cast<double>(syn) * lg(p.inventory.syn) +
           static_cast<double>(sem) * lg(p.inventory.sem) +
           static_cast<double>(constructions) * lg(p.max_slots);
  }
};

struct Tally {
  std::uint64_t uses = 0;
  std::uint64_t residuals = 0;
};

}  // namespace

double grammar_cost(const Grammar& grammar) {
  SlotTally t;
  for (const Construction& c : grammar.constructions()) t.add(c);
  return t.bits(grammar.provenance());
}

DescriptionLength description_length(const Grammar& grammar,
                                     const std::vector<AnnotatedSample>& corpus,
                                     std::size_t beam_width) {
  const EncodingCosts costs =
      EncodingCosts::for_grammar(grammar.size(), grammar.provenance().inventory.lex);
  const GrammarIndex index(grammar);
  Tally total;
  for (const AnnotatedSample& s : corpus) {
    const Encoding e = encode_matches(collect_matches(index, grammar, s), costs, beam_width);
    total.uses += e.uses();
    total.residuals += e.residuals.size();
  }
  return {grammar_cost(grammar), costs.cost(total.uses, total.residuals)};
}

double data_cost(const Grammar& grammar, const std::vector<AnnotatedSample>& corpus,
                 std::size_t beam_width) {
  return description_length(grammar, corpus, beam_width).data_bits;
}

namespace {

// Achievable (uses, residuals) pairs of a sample's covers that are optimal for
// some construction cost in [lo, hi] at fixed residual cost. Because the
// objective is linear, a prefix of a cover optimal for cost c is itself
// optimal for c, so pruning to this set at every position is exact.
struct CoverPoint {
  std::uint32_t uses = 0;
  std::uint32_t residuals = 0;
  auto operator<=>(const CoverPoint&) const = default;
};

struct CostWindow {
  double lo = 0.0;
  double hi = 0.0;
  double residual = 0.0;
};

void prune_points(std::vector<CoverPoint>& pts, const CostWindow& w) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<CoverPoint> kept;
  for (const CoverPoint& a : pts) {
    // a is optimal on {c in [lo, hi] : (ua - ub) c <= (rb - ra) cr for all b}.
    double lo = w.lo, hi = w.hi;
    for (const CoverPoint& b : pts) {
      if (&a == &b) continue;
      const double du = static_cast<double>(a.uses) - static_cast<double>(b.uses);
      const double rhs = (static_cast<double>(b.residuals) - static_cast<double>(a.residuals)) * w.residual;
      if (du > 0) {
        hi = std::min(hi, rhs / du);
      } else if (du < 0) {
        lo = std::max(lo, rhs / du);
      } else if (rhs < 0) {
        hi = -1.0, lo = 0.0;  // same uses, more residuals: never optimal
      }
    }
    if (lo <= hi + 1e-12 * std::max(1.0, std::abs(hi))) kept.push_back(a);
  }
  pts = std::move(kept);
}

std::vector<CoverPoint> cover_hull(const MatchLists& matches, const CostWindow& w) {
  const std::size_t n = matches.size();
  std::vector<std::vector<CoverPoint>> at(n + 1);
  at[0].push_back({0, 0});
  for (std::size_t p = 0; p < n; ++p) {
    prune_points(at[p], w);
    for (const CoverPoint& s : at[p]) {
      at[p + 1].push_back({s.uses, s.residuals + 1});
      for (const MatchEntry& m : matches[p]) {
        if (p + m.length <= n) at[p + m.length].push_back({s.uses + 1, s.residuals});
      }
    }
    std::vector<CoverPoint>().swap(at[p]);
  }
  prune_points(at[n], w);
  return at[n];
}

// Single-cost minimum over base matches plus extra (position, length) entries.
CoverPoint min_cover(const MatchLists& base, const std::vector<std::pair<std::size_t, std::uint32_t>>& extra,
                     const EncodingCosts& costs) {
  const std::size_t n = base.size();
  struct Best {
    CoverPoint point;
    double cost = std::numeric_limits<double>::infinity();
  };
  std::vector<Best> best(n + 1);
  best[0].cost = 0.0;
  auto relax = [&](std::size_t to, CoverPoint cand) {
    const double c = costs.cost(cand.uses, cand.residuals);
    Best& b = best[to];
    if (c < b.cost || (c == b.cost && cand.residuals < b.point.residuals)) b = {cand, c};
  };
  std::size_t e = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const CoverPoint s = best[p].point;
    relax(p + 1, {s.uses, s.residuals + 1});
    for (const MatchEntry& m : base[p]) {
      if (p + m.length <= n) relax(p + m.length, {s.uses + 1, s.residuals});
    }
    while (e < extra.size() && extra[e].first == p) {
      if (p + extra[e].second <= n) relax(p + extra[e].second, {s.uses + 1, s.residuals});
      ++e;
    }
  }
  return best[n].point;
}

CoverPoint best_point(const std::vector<CoverPoint>& hull, const EncodingCosts& costs) {
  CoverPoint best = hull.front();
  double best_cost = costs.cost(best.uses, best.residuals);
  for (const CoverPoint& p : hull) {
    const double c = costs.cost(p.uses, p.residuals);
    if (c < best_cost || (c == best_cost && p.residuals < best.residuals)) best = p, best_cost = c;
  }
  return best;
}

struct Posting {
  std::uint32_t sample = 0;
  std::uint32_t pos = 0;
};

}  // namespace

std::string config_fingerprint(const InductionConfig& config) {
  return hex64(fnv1a(fmt::format("theta={:.17g};max_slots={};beam={};seed={}", config.theta,
                                 config.max_slots, config.beam_width, config.seed)));
}

std::string corpus_fingerprint(const std::vector<AnnotatedSample>& corpus) {
  std::uint64_t h = fnv1a("");
  for (const AnnotatedSample& s : corpus) h = fnv1a(fmt::format("{:016x}{}:{}", h, s.sample_id, s.size()));
  return hex64(h);
}

InductionResult induce(const std::vector<AnnotatedSample>& corpus, const InventorySizes& sizes,
                       const InductionConfig& config) {
  if (config.max_slots < 2) fail(Errc::config, "max_slots must be at least 2");
  InductionResult result;
  Provenance prov{corpus_fingerprint(corpus), config_fingerprint(config), config.max_slots, sizes};
  result.grammar = Grammar(prov);

  const AssociationTable table = build_association(corpus, sizes);
  const std::vector<Candidate> candidates =
      generate_candidates(corpus, table, {config.theta, config.max_slots, config.beam_width});
  result.candidates = candidates.size();

  std::uint64_t total_tokens = 0;
  for (const AnnotatedSample& s : corpus) total_tokens += s.size();
  EncodingCosts costs = EncodingCosts::for_grammar(0, sizes.lex);
  result.empty_dl = costs.cost(0, total_tokens);
  if (candidates.empty()) {
    std::cerr << "warning: no construction candidates; grammar is empty\n";
    return result;
  }

  std::array<std::vector<std::vector<Posting>>, kSlotKinds> postings;
  for (std::size_t k = 0; k < kSlotKinds; ++k) postings[k].resize(sizes.of(static_cast<SlotKind>(k)));
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const AnnotatedSample& s = corpus[si];
    for (std::size_t p = 0; p < s.size(); ++p) {
      for (std::size_t k = 0; k < kSlotKinds; ++k) {
        const std::int32_t v = slot_value(s, p, static_cast<SlotKind>(k));
        if (v < 0 || static_cast<std::size_t>(v) >= postings[k].size()) continue;
        postings[k][static_cast<std::size_t>(v)].push_back(
            {static_cast<std::uint32_t>(si), static_cast<std::uint32_t>(p)});
      }
    }
  }

  const double cg_max = std::log2(static_cast<double>(candidates.size()) + 1.0);
  std::vector<MatchLists> matches(corpus.size());
  std::vector<std::vector<CoverPoint>> hulls(corpus.size());
  std::vector<CoverPoint> current(corpus.size());
  Tally tally;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    matches[si].resize(corpus[si].size());
    current[si] = {0, static_cast<std::uint32_t>(corpus[si].size())};
    hulls[si] = {current[si]};
    tally.residuals += corpus[si].size();
  }
  SlotTally slots;
  double dl = slots.bits(prov) + costs.cost(tally.uses, tally.residuals);

  std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::uint32_t>>>> hits;
  std::vector<CoverPoint> affected_points;
  for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
    const Construction& c = candidates[rank].construction;
    const auto len = static_cast<std::uint32_t>(c.size());

    std::size_t anchor = 0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      const auto& pj = postings[static_cast<std::size_t>(c.slots[j].kind)][static_cast<std::size_t>(c.slots[j].value)];
      const auto& pa = postings[static_cast<std::size_t>(c.slots[anchor].kind)][static_cast<std::size_t>(c.slots[anchor].value)];
      if (pj.size() < pa.size()) anchor = j;
    }
    hits.clear();
    for (const Posting& post : postings[static_cast<std::size_t>(c.slots[anchor].kind)]
                                       [static_cast<std::size_t>(c.slots[anchor].value)]) {
      if (post.pos < anchor) continue;
      const std::size_t start = post.pos - anchor;
      const AnnotatedSample& s = corpus[post.sample];
      if (start + len > s.size() || !match_at(c, s, start)) continue;
      if (hits.empty() || hits.back().first != post.sample) hits.push_back({post.sample, {}});
      hits.back().second.emplace_back(start, len);
    }
    if (hits.empty()) continue;

    const std::size_t new_size = result.grammar.size() + 1;
    const EncodingCosts next = EncodingCosts::for_grammar(new_size, sizes.lex);
    SlotTally next_slots = slots;
    next_slots.add(c);

    Tally next_tally;
    affected_points.clear();
    std::size_t h = 0;
    for (std::size_t si = 0; si < corpus.size(); ++si) {
      CoverPoint pt;
      if (h < hits.size() && hits[h].first == si) {
        pt = min_cover(matches[si], hits[h].second, next);
        affected_points.push_back(pt);
        ++h;
      } else {
        pt = best_point(hulls[si], next);
      }
      next_tally.uses += pt.uses;
      next_tally.residuals += pt.residuals;
    }
    const double next_dl = next_slots.bits(prov) + next.cost(next_tally.uses, next_tally.residuals);
    if (!(next_dl < dl)) continue;

    const auto id = static_cast<std::uint32_t>(result.grammar.size());
    result.grammar.add(c);
    result.log.push_back({rank, c, dl, next_dl});
    dl = next_dl;
    costs = next;
    slots = next_slots;
    tally = next_tally;
    const CostWindow window{next.construction, std::max(cg_max, next.construction), next.residual};
    for (const auto& [si, entries] : hits) {
      for (const auto& [pos, l] : entries) matches[si][pos].push_back({id, l});
      hulls[si] = cover_hull(matches[si], window);
    }
  }
  return result;
}

}  // namespace cxg
