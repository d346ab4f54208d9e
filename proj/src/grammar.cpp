#include "cxg/grammar.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "cxg/error.hpp"

namespace cxg {

std::string_view slot_kind_name(SlotKind kind) noexcept {
  switch (kind) {
    case SlotKind::lex: return "LEX";
    case SlotKind::syn: return "SYN";
    case SlotKind::sem: return "SEM";
  }
  return "?";
}

std::size_t InventorySizes::of(SlotKind kind) const {
  switch (kind) {
    case SlotKind::lex: return lex;
    case SlotKind::syn: return syn;
    case SlotKind::sem: return sem;
  }
  return 0;
}

Grammar::Grammar(Provenance provenance, std::vector<Construction> constructions)
    : provenance_(std::move(provenance)) {
  constructions_.reserve(constructions.size());
  for (Construction& c : constructions) add(std::move(c));
}

void Grammar::add(Construction c) {
  if (c.size() < 2 || c.size() > provenance_.max_slots) {
    fail(Errc::config, fmt::format("construction length {} outside [2, {}]", c.size(),
                                   provenance_.max_slots));
  }
  for (const SlotConstraint& s : c.slots) {
    const std::size_t limit = provenance_.inventory.of(s.kind);
    if (s.value < 0 || static_cast<std::size_t>(s.value) >= limit) {
      fail(Errc::config, fmt::format("{} value {} outside inventory of size {}",
                                     slot_kind_name(s.kind), s.value, limit));
    }
  }
  if (std::find(constructions_.begin(), constructions_.end(), c) != constructions_.end()) {
    fail(Errc::config, fmt::format("duplicate construction {}", display(c)));
  }
  constructions_.push_back(std::move(c));
}

std::string display(const Construction& c, const Lexicon* lexicon) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.slots.size(); ++i) {
    if (i) out += " -- ";
    const SlotConstraint& s = c.slots[i];
    out += slot_kind_name(s.kind);
    out += ':';
    switch (s.kind) {
      case SlotKind::lex:
        if (lexicon && s.value >= 0 && static_cast<std::size_t>(s.value) < lexicon->size()) {
          out += lexicon->word(s.value);
        } else {
          out += fmt::format("#{}", s.value);
        }
        break;
      case SlotKind::syn: out += pos_name(static_cast<Pos>(s.value)); break;
      case SlotKind::sem: out += fmt::format("<{}>", s.value); break;
    }
  }
  return out + "]";
}

}  // namespace cxg
