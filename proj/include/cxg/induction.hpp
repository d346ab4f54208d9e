#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxg/grammar.hpp"
#include "cxg/parser.hpp"

namespace cxg {

// DeltaP(B|A) = a/(a+b) - c/(c+d). Raises Errc::undefined_association when a
// margin is empty.
double delta_p(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

struct Contingency {
  std::uint64_t a = 0;  // cue followed by outcome
  std::uint64_t b = 0;  // cue followed by something else
  std::uint64_t c = 0;  // outcome preceded by something else
  std::uint64_t d = 0;  // neither
};

// Adjacent-pair statistics for every pairing of constraint kinds. OOV
// values take part in the margins as their own value so that a+b+c+d
// equals the number of adjacent pairs at every level.
class AssociationTable {
 public:
  AssociationTable() = default;
  AssociationTable(const std::vector<AnnotatedSample>& corpus, const InventorySizes& sizes);

  std::uint64_t total_pairs() const { return total_; }
  Contingency counts(SlotConstraint first, SlotConstraint second) const;
  // nullopt when either margin is empty.
  std::optional<double> forward(SlotConstraint first, SlotConstraint second) const;
  // Number of distinct (first, second) value pairs observed at a level.
  std::size_t distinct_pairs(SlotKind first, SlotKind second) const;

 private:
  static std::size_t level(SlotKind a, SlotKind b) {
    return static_cast<std::size_t>(a) * kSlotKinds + static_cast<std::size_t>(b);
  }
  static std::uint64_t key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
  std::uint64_t margin(const std::vector<std::uint64_t>& m, std::int32_t v) const;

  std::uint64_t total_ = 0;
  // Indexed by value + 1 so that kOov lands at slot 0.
  std::array<std::vector<std::uint64_t>, kSlotKinds> first_;
  std::array<std::vector<std::uint64_t>, kSlotKinds> second_;
  std::array<std::unordered_map<std::uint64_t, std::uint64_t>, kSlotKinds * kSlotKinds> joint_;
};

AssociationTable build_association(const std::vector<AnnotatedSample>& corpus,
                                   const InventorySizes& sizes);

struct CandidateConfig {
  double theta = 0.1;
  std::size_t max_slots = 5;
  std::size_t beam_width = 8;
};

struct Candidate {
  Construction construction;
  std::uint64_t support = 0;
  double mean_delta_p = 0.0;

  double score() const;  // support * |mean adjacent DeltaP|
};

// Best kind assignment of one span, as chosen by the beam.
struct SpanChoice {
  std::vector<SlotKind> kinds;
  double score = 0.0;
  double min_delta_p = 0.0;
};

// Runs the kind-choice beam from position `start` and returns, for each
// length 2..max_slots that fits, the best assignment (nullopt when no
// assignment has defined associations throughout).
std::vector<std::optional<SpanChoice>> best_span_choices(const AnnotatedSample& s,
                                                         std::size_t start,
                                                         const AssociationTable& table,
                                                         std::size_t max_slots,
                                                         std::size_t beam_width);

// Candidates ordered by score descending, then construction order.
std::vector<Candidate> generate_candidates(const std::vector<AnnotatedSample>& corpus,
                                           const AssociationTable& table,
                                           const CandidateConfig& config);

double grammar_cost(const Grammar& grammar);
double data_cost(const Grammar& grammar, const std::vector<AnnotatedSample>& corpus,
                 std::size_t beam_width = 8);

struct DescriptionLength {
  double grammar_bits = 0.0;
  double data_bits = 0.0;
  double total() const { return grammar_bits + data_bits; }
};

DescriptionLength description_length(const Grammar& grammar,
                                     const std::vector<AnnotatedSample>& corpus,
                                     std::size_t beam_width = 8);

struct InductionConfig {
  double theta = 0.1;
  std::size_t max_slots = 5;
  std::size_t beam_width = 8;
  std::uint64_t seed = 0;
};

struct AcceptanceRecord {
  std::size_t candidate_rank = 0;
  Construction construction;
  double dl_before = 0.0;
  double dl_after = 0.0;
};

struct InductionResult {
  Grammar grammar;
  std::vector<AcceptanceRecord> log;
  std::size_t candidates = 0;
  double empty_dl = 0.0;
};

// Greedy forward MDL selection over the ordered candidates in one pass.
InductionResult induce(const std::vector<AnnotatedSample>& corpus, const InventorySizes& sizes,
                       const InductionConfig& config);

std::string config_fingerprint(const InductionConfig& config);
std::string corpus_fingerprint(const std::vector<AnnotatedSample>& corpus);

}  // namespace cxg
