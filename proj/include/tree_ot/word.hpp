#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tree_ot/identifier.hpp"

namespace tree_ot {

/// One character of a word together with its identity and tombstone flag.
/// `depth` is the length of the anchor chain back to the head and drives
/// the placement of later inserts.
struct WordElement {
  Stamp id;
  char ch = 0;
  bool visible = true;
  std::uint32_t depth = 1;

  friend bool operator==(const WordElement&, const WordElement&) = default;
};

/// Insert `ch` right after element `anchor` (after the head when empty).
struct InsertAfter {
  std::optional<Stamp> anchor;
  Stamp id;
  char ch = 0;
  friend bool operator==(const InsertAfter&, const InsertAfter&) = default;
};

/// Tombstone element `id`.
struct Hide {
  Stamp id;
  friend bool operator==(const Hide&, const Hide&) = default;
};

using WordOp = std::variant<InsertAfter, Hide>;

/// Positional operations as a user issues them.
struct InsCh {
  std::size_t pos = 0;
  char ch = 0;
};
struct DelCh {
  std::size_t pos = 0;
};
using PositionalWordOp = std::variant<InsCh, DelCh>;

/// Replicated word. Elements sit in document order; siblings anchored on
/// the same element are ordered by descending id, each followed by the
/// elements anchored (transitively) on it.
class WordState {
 public:
  const std::vector<WordElement>& elements() const { return elems_; }

  std::optional<std::size_t> index_of(Stamp id) const {
    for (std::size_t i = 0; i < elems_.size(); ++i)
      if (elems_[i].id == id) return i;
    return std::nullopt;
  }
  bool contains(Stamp id) const { return index_of(id).has_value(); }

  std::string visible_word() const {
    std::string out;
    for (const auto& e : elems_)
      if (e.visible) out.push_back(e.ch);
    return out;
  }

  std::size_t visible_size() const {
    std::size_t n = 0;
    for (const auto& e : elems_) n += e.visible ? 1 : 0;
    return n;
  }

  friend bool operator==(const WordState&, const WordState&) = default;

 private:
  friend WordState word_apply(const WordState& s, const WordOp& op);
  std::vector<WordElement> elems_;
};

/// True when the operation's anchor (or target) is known.
inline bool word_applicable(const WordState& s, const WordOp& op) {
  if (const auto* ins = std::get_if<InsertAfter>(&op)) return !ins->anchor || s.contains(*ins->anchor);
  return s.contains(std::get<Hide>(op).id);
}

/// Throws std::logic_error when the operation is not applicable; causal
/// delivery must hold it back until it is. Re-applying an insert or a hide
/// is a no-op.
inline WordState word_apply(const WordState& s, const WordOp& op) {
  if (!word_applicable(s, op)) throw std::logic_error("word_apply: unknown anchor or target");
  WordState out = s;
  auto& el = out.elems_;
  if (const auto* hide = std::get_if<Hide>(&op)) {
    el[*s.index_of(hide->id)].visible = false;
    return out;
  }
  const auto& ins = std::get<InsertAfter>(op);
  if (s.contains(ins.id)) return out;
  std::size_t pos = 0;
  std::uint32_t depth = 0;
  if (ins.anchor) {
    pos = *s.index_of(*ins.anchor);
    depth = el[pos].depth;
    ++pos;
  }
  // Skip the anchor's subtree entries that order before the new element:
  // its children with a larger id and everything below them.
  while (pos < el.size()) {
    const auto& e = el[pos];
    if (e.depth <= depth) break;
    if (e.depth == depth + 1 && e.id < ins.id) break;
    ++pos;
  }
  el.insert(el.begin() + static_cast<std::ptrdiff_t>(pos), WordElement{ins.id, ins.ch, true, depth + 1});
  return out;
}

/// Resolves a visible position against `s`. Inserts get identity `id`.
/// Throws std::out_of_range when the position is past the visible word.
inline WordOp word_normalize(const WordState& s, const PositionalWordOp& op, Stamp id) {
  auto nth_visible = [&](std::size_t n) -> Stamp {
    for (const auto& e : s.elements()) {
      if (!e.visible) continue;
      if (n-- == 0) return e.id;
    }
    throw std::out_of_range("word_normalize: position past the end of the word");
  };
  if (const auto* ins = std::get_if<InsCh>(&op)) {
    if (ins->pos > s.visible_size()) throw std::out_of_range("word_normalize: insert position out of range");
    if (ins->pos == 0) return InsertAfter{std::nullopt, id, ins->ch};
    return InsertAfter{nth_visible(ins->pos - 1), id, ins->ch};
  }
  return Hide{nth_visible(std::get<DelCh>(op).pos)};
}

inline std::string quote_char(char c) {
  std::string out = "'";
  if (c == '\'' || c == '\\') out.push_back('\\');
  out.push_back(c);
  return out + "'";
}

/// `<1;2:'a'+,2;1:'b'->`: every element in order, `-` marking tombstones.
inline std::string canonical_serialize(const WordState& s) {
  std::string out = "<";
  bool first = true;
  for (const auto& e : s.elements()) {
    if (!first) out.push_back(',');
    first = false;
    out += e.id.to_string() + ":" + quote_char(e.ch) + (e.visible ? "+" : "-");
  }
  return out + ">";
}

inline std::string to_string(const WordOp& op) {
  if (const auto* ins = std::get_if<InsertAfter>(&op))
    return "Ins{" + (ins->anchor ? ins->anchor->to_string() : std::string("head")) + "," + ins->id.to_string() + "," +
           quote_char(ins->ch) + "}";
  return "Hide{" + std::get<Hide>(op).id.to_string() + "}";
}

}  // namespace tree_ot
