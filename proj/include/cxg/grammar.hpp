#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cxg/annotate.hpp"

namespace cxg {

enum class SlotKind : std::uint8_t { lex, syn, sem };
inline constexpr std::size_t kSlotKinds = 3;

std::string_view slot_kind_name(SlotKind kind) noexcept;  // "LEX", "SYN", "SEM"

struct SlotConstraint {
  SlotKind kind = SlotKind::syn;
  std::int32_t value = 0;  // word id, Pos ordinal, or domain id

  auto operator<=>(const SlotConstraint&) const = default;
};

// Value a token presents to a slot of the given kind (kOov for unknown words).
inline std::int32_t slot_value(const AnnotatedSample& s, std::size_t i, SlotKind kind) {
  switch (kind) {
    case SlotKind::lex: return s.words[i];
    case SlotKind::syn: return static_cast<std::int32_t>(s.tags[i]);
    case SlotKind::sem: return s.domains[i];
  }
  return kOov;
}

struct Construction {
  std::vector<SlotConstraint> slots;

  std::size_t size() const { return slots.size(); }
  auto operator<=>(const Construction&) const = default;
};

struct InventorySizes {
  std::size_t lex = 0;
  std::size_t syn = kPosCount;
  std::size_t sem = 0;

  std::size_t of(SlotKind kind) const;
  bool operator==(const InventorySizes&) const = default;
};

struct Provenance {
  std::string corpus_id;
  std::string config_hash;
  std::size_t max_slots = 5;
  InventorySizes inventory;
  bool operator==(const Provenance&) const = default;
};

// Ordered set of constructions. A construction's id is its index.
class Grammar {
 public:
  Grammar() = default;
  explicit Grammar(Provenance provenance) : provenance_(std::move(provenance)) {}
  Grammar(Provenance provenance, std::vector<Construction> constructions);

  // Validates slot bounds, inventory membership and uniqueness.
  void add(Construction c);

  const std::vector<Construction>& constructions() const { return constructions_; }
  const Construction& at(std::size_t id) const { return constructions_.at(id); }
  std::size_t size() const { return constructions_.size(); }
  bool empty() const { return constructions_.empty(); }
  const Provenance& provenance() const { return provenance_; }

  bool operator==(const Grammar&) const = default;

 private:
  Provenance provenance_;
  std::vector<Construction> constructions_;
};

// Human-readable form, e.g. "[LEX:it -- SYN:AUX -- SYN:VERB]". Without a
// lexicon, LEX slots print their ids.
std::string display(const Construction& c, const Lexicon* lexicon = nullptr);

}  // namespace cxg
