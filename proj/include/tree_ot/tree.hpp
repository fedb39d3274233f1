#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "tree_ot/identifier.hpp"

namespace tree_ot {

struct Edge;
class IdTree;

namespace detail {
struct TreeEditor;
}  // namespace detail

/// Unordered unranked tree whose edges carry (label, identifier). Sibling
/// edges are kept sorted by identifier so that structural equality is
/// independent of the order edges were supplied in.
class IdTree {
 public:
  IdTree() = default;
  /// Throws std::invalid_argument when an identifier occurs twice anywhere.
  explicit IdTree(std::vector<Edge> edges);

  const std::vector<Edge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  /// Edge carrying `id` anywhere in the tree, or nullptr.
  const Edge* find(Identifier id) const;
  bool contains(Identifier id) const { return find(id) != nullptr; }
  /// Total number of edges.
  std::size_t size() const;

  friend bool operator==(const IdTree& a, const IdTree& b);

 private:
  friend struct detail::TreeEditor;
  std::vector<Edge> edges_;
};

struct Edge {
  Label label;
  Identifier id;
  IdTree child;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.id == b.id && a.label == b.label && a.child == b.child;
  }
};

inline bool operator==(const IdTree& a, const IdTree& b) { return a.edges_ == b.edges_; }

namespace detail {

struct TreeEditor {
  static std::vector<Edge>& edges(IdTree& t) { return t.edges_; }

  static Edge* find(IdTree& t, Identifier id) {
    for (auto& e : t.edges_) {
      if (e.id == id) return &e;
      if (auto* hit = find(e.child, id)) return hit;
    }
    return nullptr;
  }

  static void insert(IdTree& t, Edge edge) {
    auto pos = std::lower_bound(t.edges_.begin(), t.edges_.end(), edge.id,
                                [](const Edge& e, Identifier id) { return e.id < id; });
    t.edges_.insert(pos, std::move(edge));
  }

  static void merge(IdTree& into, IdTree from) {
    for (auto& e : from.edges_) insert(into, std::move(e));
  }

  /// Detaches the edge carrying `id` (with its subtree) and returns it.
  static std::optional<Edge> remove(IdTree& t, Identifier id) {
    for (auto it = t.edges_.begin(); it != t.edges_.end(); ++it) {
      if (it->id == id) {
        Edge out = std::move(*it);
        t.edges_.erase(it);
        return out;
      }
      if (auto hit = remove(it->child, id)) return hit;
    }
    return std::nullopt;
  }

  static void collect_ids(const IdTree& t, std::vector<Identifier>& out) {
    for (const auto& e : t.edges()) {
      out.push_back(e.id);
      collect_ids(e.child, out);
    }
  }
};

}  // namespace detail

inline std::vector<Identifier> identifiers(const IdTree& t) {
  std::vector<Identifier> out;
  detail::TreeEditor::collect_ids(t, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline bool identifiers_unique(const IdTree& t) {
  auto ids = identifiers(t);
  return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

inline IdTree::IdTree(std::vector<Edge> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  if (!identifiers_unique(*this)) throw std::invalid_argument("IdTree: identifier occurs more than once");
}

inline const Edge* IdTree::find(Identifier id) const {
  for (const auto& e : edges_) {
    if (e.id == id) return &e;
    if (const auto* hit = e.child.find(id)) return hit;
  }
  return nullptr;
}

inline std::size_t IdTree::size() const {
  std::size_t n = edges_.size();
  for (const auto& e : edges_) n += e.child.size();
  return n;
}

/// Child tree of the edge carrying `id`; empty when `id` is absent.
inline IdTree proj_children(const IdTree& t, Identifier id) {
  const Edge* e = t.find(id);
  return e ? e->child : IdTree{};
}

/// Singleton tree holding the edge carrying `id`; empty when absent.
inline IdTree proj_edge(const IdTree& t, Identifier id) {
  IdTree out;
  if (const Edge* e = t.find(id)) detail::TreeEditor::edges(out).push_back(*e);
  return out;
}

/// Removes the edge carrying `id` together with its subtree.
inline IdTree erase(const IdTree& t, Identifier id) {
  IdTree out = t;
  detail::TreeEditor::remove(out, id);
  return out;
}

/// Unions `s` into the child of the edge carrying `id`. When `id` is absent
/// the tree is returned unchanged and `s` is discarded. Identifiers of `s`
/// must be disjoint from those of `t`.
inline IdTree add_tree(const IdTree& t, Identifier id, const IdTree& s) {
  IdTree out = t;
  if (Edge* e = detail::TreeEditor::find(out, id)) detail::TreeEditor::merge(e->child, s);
  return out;
}

namespace detail {

inline void serialize_into(const IdTree& t, std::string& out) {
  out.push_back('[');
  for (const auto& e : t.edges()) {
    out.push_back('(');
    out += e.label.to_string();
    out.push_back(',');
    out += e.id.to_string();
    out.push_back(')');
    serialize_into(e.child, out);
  }
  out.push_back(']');
}

}  // namespace detail

/// Byte-exact comparison format: tree := '[' edge* ']',
/// edge := '(' label ',' id ')' tree, siblings ascending by identifier.
inline std::string canonical_serialize(const IdTree& t) {
  std::string out;
  detail::serialize_into(t, out);
  return out;
}

/// Tree of the form {(^,data)(doc), (^,mem)(memory)} with no reserved
/// identifier below the two root edges.
class WellFormedTree {
 public:
  WellFormedTree() : WellFormedTree(IdTree{}, IdTree{}) {}

  WellFormedTree(IdTree document, IdTree memory) {
    std::vector<Edge> top;
    top.push_back(Edge{Label::bottom(), Identifier::data(), std::move(document)});
    top.push_back(Edge{Label::bottom(), Identifier::mem(), std::move(memory)});
    root_ = IdTree(std::move(top));
    if (!valid(root_)) throw std::invalid_argument("WellFormedTree: reserved identifier below the root edges");
  }

  /// Validates an arbitrary root tree.
  static WellFormedTree from_root(IdTree root) {
    if (!valid(root)) throw std::invalid_argument("WellFormedTree: not a well-formed tree");
    return WellFormedTree(std::move(root), Unchecked{});
  }

  /// Structural check used by constructors and tests.
  static bool valid(const IdTree& root) {
    const auto& top = root.edges();
    if (top.size() != 2) return false;
    if (top[0].id != Identifier::data() || top[1].id != Identifier::mem()) return false;
    if (top[0].label != Label::bottom() || top[1].label != Label::bottom()) return false;
    if (!identifiers_unique(root)) return false;
    for (const auto& e : top) {
      for (auto id : identifiers(e.child))
        if (id.is_reserved()) return false;
    }
    return true;
  }

  const IdTree& root() const { return root_; }
  const IdTree& document() const { return root_.edges()[0].child; }
  const IdTree& memory() const { return root_.edges()[1].child; }

  bool contains(Identifier id) const { return root_.contains(id); }

  friend bool operator==(const WellFormedTree& a, const WellFormedTree& b) { return a.root_ == b.root_; }

 private:
  struct Unchecked {};
  WellFormedTree(IdTree root, Unchecked) : root_(std::move(root)) {}

  friend WellFormedTree apply_unchecked(IdTree root);

  IdTree root_;
};

inline std::string canonical_serialize(const WellFormedTree& t) { return canonical_serialize(t.root()); }

// ---------------------------------------------------------------------------
// Operations

struct NopOp {
  friend bool operator==(const NopOp&, const NopOp&) = default;
};

/// Add a NoValue-labelled leaf edge `node` under `parent`.
struct AddOp {
  Identifier parent;
  Identifier node;
  friend bool operator==(const AddOp&, const AddOp&) = default;
};

/// Delete edge `node`; its children are parked under mem.
struct DelOp {
  Identifier node;
  friend bool operator==(const DelOp&, const DelOp&) = default;
};

/// Move edge `node` (with its subtree) under `parent`. `site` is the issuing
/// site, used for priority between concurrent moves of the same node.
struct MoveOp {
  Identifier node;
  Identifier parent;
  std::uint32_t site = 0;
  friend bool operator==(const MoveOp&, const MoveOp&) = default;
};

struct RenameOp {
  Identifier node;
  Label label;
  std::uint32_t site = 0;
  friend bool operator==(const RenameOp&, const RenameOp&) = default;
};

using TreeOp = std::variant<NopOp, AddOp, DelOp, MoveOp, RenameOp>;

inline bool is_nop(const TreeOp& op) { return std::holds_alternative<NopOp>(op); }

/// Operation-set membership: targets are never reserved, a move never
/// targets itself, and the bottom label is never written.
inline bool is_valid(const TreeOp& op) {
  return std::visit(
      [](const auto& o) -> bool {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NopOp>) {
          return true;
        } else if constexpr (std::is_same_v<T, AddOp> || std::is_same_v<T, DelOp>) {
          return o.node.is_gen();
        } else if constexpr (std::is_same_v<T, MoveOp>) {
          return o.node.is_gen() && o.node != o.parent;
        } else {
          return o.node.is_gen() && o.label.kind() != Label::Kind::kBottom;
        }
      },
      op);
}

inline const char* kind_name(const TreeOp& op) {
  static constexpr const char* kNames[] = {"Nop", "Add", "Del", "Mv", "Ren"};
  return kNames[op.index()];
}

/// One-line printer: Op{Add,data,1;1}, Op{Mv,1;1,mem,s=2}, ...
inline std::string to_string(const TreeOp& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NopOp>) {
          return "Op{Nop}";
        } else if constexpr (std::is_same_v<T, AddOp>) {
          return "Op{Add," + o.parent.to_string() + "," + o.node.to_string() + "}";
        } else if constexpr (std::is_same_v<T, DelOp>) {
          return "Op{Del," + o.node.to_string() + "}";
        } else if constexpr (std::is_same_v<T, MoveOp>) {
          return "Op{Mv," + o.node.to_string() + "," + o.parent.to_string() + ",s=" + std::to_string(o.site) + "}";
        } else {
          return "Op{Ren," + o.node.to_string() + "," + o.label.to_string() + ",s=" + std::to_string(o.site) + "}";
        }
      },
      op);
}

/// What Mv does when the destination lies inside the moved subtree. This
/// only happens through concurrent moves; locally generated moves exclude it.
enum class MoveCycle {
  /// Every edge on the path from the moved node down to the destination is
  /// re-parented under mem, keeping its off-path children. Nothing is lost.
  kDetachPath,
  /// Erase-then-AddTree taken literally: the moved subtree is discarded
  /// because the destination vanished with it.
  kDrop,
};

inline const char* to_string(MoveCycle policy) {
  return policy == MoveCycle::kDrop ? "drop" : "detach";
}

inline std::optional<MoveCycle> parse_move_cycle(std::string_view text) {
  if (text == "detach") return MoveCycle::kDetachPath;
  if (text == "drop") return MoveCycle::kDrop;
  return std::nullopt;
}

inline WellFormedTree apply_unchecked(IdTree root) { return WellFormedTree(std::move(root), WellFormedTree::Unchecked{}); }

namespace detail {

inline IdTree apply_move_detach(const IdTree& root, const MoveOp& mv) {
  const Edge* moved = root.find(mv.node);
  if (!moved || !root.contains(mv.parent)) return root;
  if (!moved->child.contains(mv.parent)) return add_tree(erase(root, mv.node), mv.parent, proj_edge(root, mv.node));

  // Destination is a strict descendant: split the path node by node.
  IdTree parked;
  const Edge* cur = moved;
  while (true) {
    if (cur->id == mv.parent) {
      TreeEditor::insert(parked, *cur);
      break;
    }
    const Edge* next = nullptr;
    Edge kept{cur->label, cur->id, IdTree{}};
    for (const auto& c : cur->child.edges()) {
      if (!next && (c.id == mv.parent || c.child.contains(mv.parent)))
        next = &c;
      else
        TreeEditor::edges(kept.child).push_back(c);
    }
    TreeEditor::insert(parked, std::move(kept));
    cur = next;
  }
  return add_tree(erase(root, mv.node), Identifier::mem(), parked);
}

inline IdTree rename(const IdTree& root, const RenameOp& ren) {
  IdTree out = root;
  if (Edge* e = TreeEditor::find(out, ren.node)) e->label = ren.label;
  return out;
}

}  // namespace detail

/// Applies one operation. Total on well-formed trees: operations naming an
/// absent identifier leave the tree unchanged (Add under an absent parent is
/// dropped), and Add of an identifier that already exists is ignored.
/// Throws std::invalid_argument for an operation outside the operation set.
/// Function object: unqualified calls must not find std::apply through ADL.
inline constexpr struct ApplyFn {
  WellFormedTree operator()(const WellFormedTree& t, const TreeOp& op,
                            MoveCycle policy = MoveCycle::kDetachPath) const {
    if (!is_valid(op)) throw std::invalid_argument("apply: invalid operation " + to_string(op));
    const IdTree& root = t.root();
    return std::visit(
        [&](const auto& o) -> WellFormedTree {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, NopOp>) {
            return t;
          } else if constexpr (std::is_same_v<T, AddOp>) {
            if (root.contains(o.node)) return t;
            IdTree leaf({Edge{Label::no_value(), o.node, IdTree{}}});
            return apply_unchecked(add_tree(root, o.parent, leaf));
          } else if constexpr (std::is_same_v<T, DelOp>) {
            return apply_unchecked(add_tree(erase(root, o.node), Identifier::mem(), proj_children(root, o.node)));
          } else if constexpr (std::is_same_v<T, MoveOp>) {
            if (policy == MoveCycle::kDrop)
              return apply_unchecked(add_tree(erase(root, o.node), o.parent, proj_edge(root, o.node)));
            return apply_unchecked(detail::apply_move_detach(root, o));
          } else {
            return apply_unchecked(detail::rename(root, o));
          }
        },
        op);
  }
} apply{};

/// True when `inner` is `outer` or lies in the subtree below `outer`.
inline bool in_subtree(const IdTree& root, Identifier outer, Identifier inner) {
  if (outer == inner) return root.contains(outer);
  const Edge* e = root.find(outer);
  return e && e->child.contains(inner);
}

}  // namespace tree_ot
