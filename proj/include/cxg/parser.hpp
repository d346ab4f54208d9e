#pragma once

#include <cstdint>
#include <vector>

#include "cxg/grammar.hpp"

namespace cxg {

// True iff every slot of `c` is satisfied by the token at position i + j.
// Raises Errc::precondition when the construction runs past the sample.
bool match_at(const Construction& c, const AnnotatedSample& s, std::size_t i);

// Buckets constructions by their first slot so that scanning a sample only
// tests constructions whose first slot can match.
class GrammarIndex {
 public:
  explicit GrammarIndex(const Grammar& grammar);

  template <class Fn>
  void for_each_match(const AnnotatedSample& s, std::size_t i, Fn&& fn) const {
    visit_bucket(lex_, s.words[i], s, i, fn);
    visit_bucket(syn_, static_cast<std::int32_t>(s.tags[i]), s, i, fn);
    visit_bucket(sem_, s.domains[i], s, i, fn);
  }

 private:
  template <class Fn>
  void visit_bucket(const std::vector<std::vector<std::uint32_t>>& bucket, std::int32_t value,
                    const AnnotatedSample& s, std::size_t i, Fn& fn) const {
    if (value < 0 || static_cast<std::size_t>(value) >= bucket.size()) return;
    for (std::uint32_t id : bucket[static_cast<std::size_t>(value)]) {
      const Construction& c = grammar_->at(id);
      if (i + c.size() <= s.size() && match_at(c, s, i)) fn(id);
    }
  }

  const Grammar* grammar_;
  std::vector<std::vector<std::uint32_t>> lex_, syn_, sem_;
};

struct FeatureVector {
  std::string sample_id;
  std::string city_id;
  std::string country;
  Month month;
  std::vector<std::uint32_t> counts;  // one per construction id
};

// Bag of constructions: every matching position is counted, overlaps included.
FeatureVector count(const Grammar& grammar, const AnnotatedSample& s);

struct EncodingCosts {
  double construction = 0.0;  // log2(|G| + 1)
  double residual = 0.0;      // log2(|lexicon| + 1)

  static EncodingCosts for_grammar(std::size_t grammar_size, std::size_t lexicon_size);
  double cost(std::size_t uses, std::size_t residuals) const {
    return static_cast<double>(uses) * construction + static_cast<double>(residuals) * residual;
  }
};

struct Span {
  std::size_t start = 0;
  std::uint32_t construction = 0;
  bool operator==(const Span&) const = default;
};

struct Encoding {
  std::vector<Span> spans;
  std::vector<std::size_t> residuals;
  double cost = 0.0;

  std::size_t uses() const { return spans.size(); }
};

// Per-position lists of (construction id, length) matches.
struct MatchEntry {
  std::uint32_t construction = 0;
  std::uint32_t length = 0;
};
using MatchLists = std::vector<std::vector<MatchEntry>>;

MatchLists collect_matches(const GrammarIndex& index, const Grammar& grammar,
                           const AnnotatedSample& s);

inline constexpr std::size_t kUnboundedBeam = static_cast<std::size_t>(-1);

// Left-to-right beam search over cover states. The beam at each position
// keeps the `beam_width` best partial covers reaching it, ordered by
// (cost, residual count, construction id of the last step).
Encoding encode_matches(const MatchLists& matches, const EncodingCosts& costs,
                        std::size_t beam_width);

// Costs come from the grammar size and the lexicon size in its provenance.
Encoding encode_sample(const Grammar& grammar, const AnnotatedSample& s,
                       std::size_t beam_width);

}  // namespace cxg
