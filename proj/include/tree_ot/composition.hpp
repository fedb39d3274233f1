#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tree_ot/integrate.hpp"
#include "tree_ot/word.hpp"

namespace tree_ot {

struct TreeSide {
  TreeOp op;
  friend bool operator==(const TreeSide&, const TreeSide&) = default;
};

/// Word operation on the word attached to node `id`.
struct DataSide {
  Identifier id;
  WordOp op;
  friend bool operator==(const DataSide&, const DataSide&) = default;
};

using ComposedOp = std::variant<TreeSide, DataSide>;

inline std::string to_string(const ComposedOp& op) {
  if (const auto* t = std::get_if<TreeSide>(&op)) return to_string(t->op);
  const auto& d = std::get<DataSide>(op);
  return "Word{" + d.id.to_string() + "," + to_string(d.op) + "}";
}

/// A tree whose Gen nodes each carry a word. `delta` has exactly one entry
/// per Gen identifier of the tree, memory part included.
struct LabeledTreeState {
  WellFormedTree tree;
  std::map<Identifier, WordState> delta;

  friend bool operator==(const LabeledTreeState&, const LabeledTreeState&) = default;
};

namespace detail {

inline void sync_domain(LabeledTreeState& s) {
  auto ids = identifiers(s.tree.root());
  std::map<Identifier, WordState> next;
  for (auto id : ids) {
    if (!id.is_gen()) continue;
    auto it = s.delta.find(id);
    next.emplace(id, it == s.delta.end() ? WordState{} : std::move(it->second));
  }
  s.delta = std::move(next);
}

}  // namespace detail

/// Tree operations go through `apply` and leave the words of surviving
/// nodes alone; new nodes start with the empty word and vanished nodes lose
/// theirs. Word operations on a node absent from the tree are ignored.
inline LabeledTreeState composed_do(const LabeledTreeState& s, const ComposedOp& op,
                                    MoveCycle policy = MoveCycle::kDetachPath) {
  LabeledTreeState out = s;
  if (const auto* t = std::get_if<TreeSide>(&op)) {
    out.tree = apply(s.tree, t->op, policy);
    detail::sync_domain(out);
    return out;
  }
  const auto& d = std::get<DataSide>(op);
  auto it = out.delta.find(d.id);
  if (it != out.delta.end()) it->second = word_apply(it->second, d.op);
  return out;
}

inline void serialize_into(const IdTree& t, const std::map<Identifier, WordState>& delta, std::string& out) {
  out.push_back('[');
  for (const auto& e : t.edges()) {
    out += "(" + e.label.to_string() + "," + e.id.to_string();
    if (auto it = delta.find(e.id); it != delta.end()) out += "|" + canonical_serialize(it->second);
    out.push_back(')');
    serialize_into(e.child, delta, out);
  }
  out.push_back(']');
}

/// Tree serialization with `|<word>` after each Gen identifier.
inline std::string canonical_serialize(const LabeledTreeState& s) {
  std::string out;
  serialize_into(s.tree.root(), s.delta, out);
  return out;
}

/// Sub-algorithm requests. A tree request carries the tree requests of its
/// causal past; a word request names the word it belongs to.
struct TreeRequest {
  RequestId id;
  TreeOp op;
  std::set<RequestId> past;
};

struct WordRequest {
  RequestId id;
  Identifier node;
  WordOp op;
};

using ComposedRequest = std::variant<TreeRequest, WordRequest>;

inline RequestId request_id(const ComposedRequest& r) {
  return std::visit([](const auto& x) { return x.id; }, r);
}

/// Environment of the product algorithm: one tree integrator and one word
/// replica per node. Word replicas outlive their node so that late word
/// requests still integrate; only live nodes show up in state().
class ComposedEnvironment {
 public:
  explicit ComposedEnvironment(MoveCycle policy = MoveCycle::kDetachPath) : tree_(policy) {}

  const TreeIntegrator& tree() const { return tree_; }
  const std::map<Identifier, WordState>& words() const { return words_; }
  const LabeledTreeState& state() const { return state_; }

  /// Throws std::invalid_argument for a word operation on a node outside
  /// the tree or one that does not fit the current word.
  ComposedRequest route_local(RequestId id, const ComposedOp& op) {
    if (const auto* t = std::get_if<TreeSide>(&op)) {
      const auto& entry = tree_.integrate_local(id, t->op);
      state_ = composed_do(state_, TreeSide{entry.executed}, tree_.policy());
      return TreeRequest{id, entry.op, entry.past};
    }
    const auto& d = std::get<DataSide>(op);
    if (!state_.delta.count(d.id)) throw std::invalid_argument("route_local: node " + d.id.to_string() + " not in tree");
    if (!word_applicable(words_[d.id], d.op)) throw std::invalid_argument("route_local: word operation does not apply");
    integrate_word(d.id, d.op);
    return WordRequest{id, d.id, d.op};
  }

  void route_external(const ComposedRequest& r) {
    if (const auto* t = std::get_if<TreeRequest>(&r)) {
      const auto& entry = tree_.integrate(t->id, t->op, t->past);
      state_ = composed_do(state_, TreeSide{entry.executed}, tree_.policy());
      return;
    }
    const auto& w = std::get<WordRequest>(r);
    integrate_word(w.node, w.op);
  }

 private:
  void integrate_word(Identifier node, const WordOp& op) {
    auto& word = words_[node];
    word = word_apply(word, op);
    state_ = composed_do(state_, DataSide{node, op}, tree_.policy());
  }

  TreeIntegrator tree_;
  std::map<Identifier, WordState> words_;
  LabeledTreeState state_;
};

}  // namespace tree_ot
