#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace tree_ot::paths {

struct NameEdge;

/// Unordered tree addressed by paths of names; sibling names are unique.
/// Edges are kept sorted by name.
class NameTree {
 public:
  NameTree() = default;
  /// Throws std::invalid_argument on a repeated sibling name.
  explicit NameTree(std::vector<NameEdge> edges);

  const std::vector<NameEdge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }
  std::size_t size() const;

  const NameEdge* child(const std::string& name) const;
  NameEdge* child(const std::string& name);
  /// Inserts a new edge; the name must not be present.
  NameEdge& insert(std::string name, NameTree sub);
  void remove(const std::string& name);

  friend bool operator==(const NameTree& a, const NameTree& b);

 private:
  std::vector<NameEdge> edges_;
};

struct NameEdge {
  std::string name;
  NameTree child;
  friend bool operator==(const NameEdge& a, const NameEdge& b) { return a.name == b.name && a.child == b.child; }
};

inline bool operator==(const NameTree& a, const NameTree& b) { return a.edges_ == b.edges_; }

inline NameTree::NameTree(std::vector<NameEdge> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(), [](const NameEdge& a, const NameEdge& b) { return a.name < b.name; });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end(),
                                [](const NameEdge& a, const NameEdge& b) { return a.name == b.name; });
  if (dup != edges_.end()) throw std::invalid_argument("NameTree: repeated sibling name " + dup->name);
}

inline std::size_t NameTree::size() const {
  std::size_t n = edges_.size();
  for (const auto& e : edges_) n += e.child.size();
  return n;
}

inline const NameEdge* NameTree::child(const std::string& name) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), name,
                             [](const NameEdge& e, const std::string& n) { return e.name < n; });
  return it != edges_.end() && it->name == name ? &*it : nullptr;
}

inline NameEdge* NameTree::child(const std::string& name) {
  return const_cast<NameEdge*>(std::as_const(*this).child(name));
}

inline NameEdge& NameTree::insert(std::string name, NameTree sub) {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), name,
                             [](const NameEdge& e, const std::string& n) { return e.name < n; });
  return *edges_.insert(it, NameEdge{std::move(name), std::move(sub)});
}

inline void NameTree::remove(const std::string& name) {
  std::erase_if(edges_, [&](const NameEdge& e) { return e.name == name; });
}

/// `name(children...)` with siblings in name order; the empty tree is `{}`.
inline std::string to_string(const NameTree& t) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : t.edges()) {
    if (!first) out += ",";
    first = false;
    out += e.name;
    if (!e.child.empty()) out += to_string(e.child);
  }
  return out + "}";
}

using Path = std::vector<std::string>;

/// Dot-joined; the empty path prints as `-`.
inline std::string to_string(const Path& p) {
  if (p.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "." : "") + p[i];
  return out;
}

/// Non-strict prefix: a ◁ a.b and a ◁ a.
inline bool is_prefix(const Path& a, const Path& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

inline Path extend(Path p, const std::string& n) {
  p.push_back(n);
  return p;
}

/// Subtree reached along `p`, or the empty tree.
inline NameTree project(const NameTree& t, const Path& p) {
  const NameTree* cur = &t;
  for (const auto& n : p) {
    const NameEdge* e = cur->child(n);
    if (!e) return {};
    cur = &e->child;
  }
  return *cur;
}

inline bool has_path(const NameTree& t, const Path& p) {
  const NameTree* cur = &t;
  for (const auto& n : p) {
    const NameEdge* e = cur->child(n);
    if (!e) return false;
    cur = &e->child;
  }
  return true;
}

struct NopP {
  friend bool operator==(const NopP&, const NopP&) = default;
};
/// Add edge `name` at the end of `path`, creating missing path edges.
struct AddP {
  Path path;
  std::string name;
  friend bool operator==(const AddP&, const AddP&) = default;
};
/// Replace edge `name` at the end of `path` by its children.
struct Del1P {
  Path path;
  std::string name;
  friend bool operator==(const Del1P&, const Del1P&) = default;
};
/// Remove edge `name` at the end of `path` with its whole subtree.
struct Del2P {
  Path path;
  std::string name;
  friend bool operator==(const Del2P&, const Del2P&) = default;
};

using PathOp = std::variant<NopP, AddP, Del1P, Del2P>;

inline const char* kind_name(const PathOp& op) {
  static constexpr const char* kNames[] = {"Nop", "Add", "Del1", "Del2"};
  return kNames[op.index()];
}

inline std::string to_string(const PathOp& op) {
  return std::visit(
      [&](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NopP>)
          return "Nop()";
        else
          return std::string(kind_name(op)) + "(" + to_string(o.path) + "," + o.name + ")";
      },
      op);
}

/// The ⊕ used when Del1 promotes children: a promoted edge whose name is
/// already present is merged into the existing sibling, recursively.
inline void merge_into(NameTree& into, const NameTree& from) {
  for (const auto& e : from.edges()) {
    if (NameEdge* existing = into.child(e.name))
      merge_into(existing->child, e.child);
    else
      into.insert(e.name, e.child);
  }
}

namespace detail {

inline void add_at(NameTree& t, const Path& p, std::size_t i, const std::string& n) {
  if (i == p.size()) {
    if (!t.child(n)) t.insert(n, {});
    return;
  }
  NameEdge* e = t.child(p[i]);
  if (!e) e = &t.insert(p[i], {});
  add_at(e->child, p, i + 1, n);
}

template <bool kPromote>
void del_at(NameTree& t, const Path& p, std::size_t i, const std::string& n) {
  if (i == p.size()) {
    const NameEdge* e = t.child(n);
    if (!e) return;
    NameTree promoted = e->child;
    t.remove(n);
    if constexpr (kPromote) merge_into(t, promoted);
    return;
  }
  if (NameEdge* e = t.child(p[i])) del_at<kPromote>(e->child, p, i + 1, n);
}

}  // namespace detail

inline NameTree apply_path(const NameTree& t, const PathOp& op) {
  NameTree out = t;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AddP>)
          detail::add_at(out, o.path, 0, o.name);
        else if constexpr (std::is_same_v<T, Del1P>)
          detail::del_at<true>(out, o.path, 0, o.name);
        else if constexpr (std::is_same_v<T, Del2P>)
          detail::del_at<false>(out, o.path, 0, o.name);
      },
      op);
  return out;
}

/// Transformation for {Nop, Add, Del2}. Throws std::invalid_argument when
/// either argument is a Del1.
inline PathOp it_del2(const PathOp& op1, const PathOp& op2) {
  if (std::holds_alternative<Del1P>(op1) || std::holds_alternative<Del1P>(op2))
    throw std::invalid_argument("it_del2: Del1 is outside the operation set");
  if (std::holds_alternative<NopP>(op1)) return NopP{};
  const auto* del = std::get_if<Del2P>(&op2);
  if (!del) return op1;
  const Path gone = extend(del->path, del->name);
  return std::visit(
      [&](const auto& o) -> PathOp {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AddP> || std::is_same_v<T, Del2P>) {
          if (o.path == del->path && o.name == del->name) return NopP{};
          if (is_prefix(gone, o.path)) return NopP{};
          return o;
        } else {
          return o;
        }
      },
      op1);
}

// ---------------------------------------------------------------------------
// Enumeration and checks

/// Every name-unique tree with exactly `edges` edges over `alphabet`.
inline std::vector<NameTree> trees_with_edges(std::size_t edges, const std::vector<std::string>& alphabet) {
  // forest(k, from): forests of k edges using names alphabet[from..].
  std::map<std::pair<std::size_t, std::size_t>, std::vector<NameTree>> memo;
  std::function<const std::vector<NameTree>&(std::size_t, std::size_t)> forest =
      [&](std::size_t k, std::size_t from) -> const std::vector<NameTree>& {
    auto key = std::make_pair(k, from);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<NameTree> out;
    if (k == 0) {
      out.emplace_back();
    } else if (from < alphabet.size()) {
      out = forest(k, from + 1);  // name `from` unused
      for (std::size_t own = 1; own <= k; ++own) {
        const auto subs = forest(own - 1, 0);
        const auto rests = forest(k - own, from + 1);
        for (const auto& sub : subs) {
          for (const auto& rest : rests) {
            NameTree t = rest;
            t.insert(alphabet[from], sub);
            out.push_back(std::move(t));
          }
        }
      }
    }
    return memo[key] = std::move(out);
  };
  return forest(edges, 0);
}

/// Paths of every node of `t`, the root included.
inline std::vector<Path> node_paths(const NameTree& t) {
  std::vector<Path> out{Path{}};
  std::function<void(const NameTree&, const Path&)> walk = [&](const NameTree& sub, const Path& at) {
    for (const auto& e : sub.edges()) {
      out.push_back(extend(at, e.name));
      walk(e.child, out.back());
    }
  };
  walk(t, {});
  return out;
}

/// Nop; Add at any node path or one name beyond it; Del2 of any edge.
inline std::vector<PathOp> generable_del2_ops(const NameTree& t, const std::vector<std::string>& alphabet) {
  std::vector<PathOp> ops{NopP{}};
  auto nodes = node_paths(t);
  std::vector<Path> targets = nodes;
  for (const auto& p : nodes) {
    const NameTree here = project(t, p);
    for (const auto& a : alphabet)
      if (!here.child(a)) targets.push_back(extend(p, a));
  }
  for (const auto& p : targets)
    for (const auto& a : alphabet) ops.push_back(AddP{p, a});
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    Path parent(nodes[i].begin(), nodes[i].end() - 1);
    ops.push_back(Del2P{parent, nodes[i].back()});
  }
  return ops;
}

struct LegacyReport {
  std::uint64_t trees = 0;
  std::uint64_t tp1_cases = 0;
  std::uint64_t tp1_violations = 0;
  std::uint64_t tp2_cases = 0;
  std::uint64_t tp2_violations = 0;
  std::vector<std::string> witnesses;

  bool ok() const { return tp1_violations == 0 && tp2_violations == 0; }
};

/// TP1 over generable pairs on trees with at most `tp1_edges` edges and TP2
/// over generable triples on trees with at most `tp2_edges` edges.
inline LegacyReport check_tp1_tp2_del2(std::size_t tp1_edges, std::size_t tp2_edges,
                                       const std::vector<std::string>& alphabet = {"a", "b", "c"}) {
  constexpr std::size_t kMaxWitnesses = 8;
  LegacyReport report;
  for (std::size_t k = 0; k <= std::max(tp1_edges, tp2_edges); ++k) {
    for (const auto& t : trees_with_edges(k, alphabet)) {
      ++report.trees;
      const auto ops = generable_del2_ops(t, alphabet);
      if (k <= tp1_edges) {
        std::vector<NameTree> after;
        after.reserve(ops.size());
        for (const auto& op : ops) after.push_back(apply_path(t, op));
        for (std::size_t i = 0; i < ops.size(); ++i) {
          for (std::size_t j = 0; j < ops.size(); ++j) {
            ++report.tp1_cases;
            auto left = apply_path(after[i], it_del2(ops[j], ops[i]));
            auto right = apply_path(after[j], it_del2(ops[i], ops[j]));
            if (left == right) continue;
            ++report.tp1_violations;
            if (report.witnesses.size() < kMaxWitnesses)
              report.witnesses.push_back("TP1 t=" + to_string(t) + " op1=" + to_string(ops[i]) + " op2=" +
                                         to_string(ops[j]) + " left=" + to_string(left) + " right=" + to_string(right));
          }
        }
      }
      if (k <= tp2_edges) {
        for (const auto& op1 : ops) {
          for (const auto& op2 : ops) {
            const PathOp t21 = it_del2(op2, op1);
            const PathOp t12 = it_del2(op1, op2);
            for (const auto& op : ops) {
              ++report.tp2_cases;
              PathOp left = it_del2(it_del2(op, op1), t21);
              PathOp right = it_del2(it_del2(op, op2), t12);
              if (left == right) continue;
              ++report.tp2_violations;
              if (report.witnesses.size() < kMaxWitnesses)
                report.witnesses.push_back("TP2 op=" + to_string(op) + " op1=" + to_string(op1) + " op2=" +
                                           to_string(op2) + " left=" + to_string(left) + " right=" + to_string(right));
            }
          }
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Falsifier for {Nop, Add, Del1}

/// Symbolic argument of a candidate: one of the concurrent operations'
/// parameters or a fresh name.
enum class Atom { kAddPath, kAddName, kDelPath, kDelName, kFresh };

inline const char* to_string(Atom a) {
  switch (a) {
    case Atom::kAddPath: return "P";
    case Atom::kAddName: return "N";
    case Atom::kDelPath: return "Q";
    case Atom::kDelName: return "M";
    case Atom::kFresh: return "z";
  }
  return "?";
}

/// Candidate operation built from the arguments of Add(P,N) and Del1(Q,M).
struct Candidate {
  enum class Kind { kNop, kAdd, kDel } kind = Kind::kNop;
  std::vector<Atom> path;
  Atom name = Atom::kAddName;
};

inline std::string to_string(const Candidate& c) {
  if (c.kind == Candidate::Kind::kNop) return "Nop()";
  std::string p;
  for (std::size_t i = 0; i < c.path.size(); ++i) p += (i ? "." : "") + std::string(to_string(c.path[i]));
  if (p.empty()) p = "-";
  return std::string(c.kind == Candidate::Kind::kAdd ? "Add(" : "Del(") + p + "," + to_string(c.name) + ")";
}

inline const char* case_label(Candidate::Kind k) {
  switch (k) {
    case Candidate::Kind::kNop: return "Nop";
    case Candidate::Kind::kAdd: return "Add";
    case Candidate::Kind::kDel: return "Del";
  }
  return "?";
}

/// Every candidate whose path is a concatenation of at most `depth` atoms.
inline std::vector<Candidate> candidate_space(std::size_t depth) {
  static constexpr Atom kAtoms[] = {Atom::kAddPath, Atom::kAddName, Atom::kDelPath, Atom::kDelName, Atom::kFresh};
  static constexpr Atom kNames[] = {Atom::kAddName, Atom::kDelName, Atom::kFresh};
  std::vector<std::vector<Atom>> paths{{}};
  for (std::size_t len = 1, from = 0; len <= depth; ++len) {
    std::size_t to = paths.size();
    for (std::size_t i = from; i < to; ++i) {
      for (Atom a : kAtoms) {
        auto p = paths[i];
        p.push_back(a);
        paths.push_back(std::move(p));
      }
    }
    from = to;
  }
  std::vector<Candidate> out{Candidate{}};
  for (auto kind : {Candidate::Kind::kAdd, Candidate::Kind::kDel}) {
    for (const auto& p : paths)
      for (Atom n : kNames) out.push_back(Candidate{kind, p, n});
  }
  return out;
}

struct FalsifierScenario {
  NameTree tree;
  AddP add;
  Del1P del;
  std::string fresh = "z";
};

/// t = {n{m}}, op1 = Add(n.m, r), op2 = Del1(-, n): t1 = {n{m{r}}}, t2 = {m}.
inline FalsifierScenario default_falsifier_scenario() {
  FalsifierScenario s;
  s.tree = NameTree({NameEdge{"n", NameTree({NameEdge{"m", {}}})}});
  s.add = AddP{{"n", "m"}, "r"};
  s.del = Del1P{{}, "n"};
  return s;
}

inline PathOp instantiate(const Candidate& c, const FalsifierScenario& s) {
  auto bind = [&](Atom a) -> Path {
    switch (a) {
      case Atom::kAddPath: return s.add.path;
      case Atom::kAddName: return {s.add.name};
      case Atom::kDelPath: return s.del.path;
      case Atom::kDelName: return {s.del.name};
      case Atom::kFresh: return {s.fresh};
    }
    return {};
  };
  if (c.kind == Candidate::Kind::kNop) return NopP{};
  Path p;
  for (Atom a : c.path) {
    auto part = bind(a);
    p.insert(p.end(), part.begin(), part.end());
  }
  std::string n = bind(c.name).front();
  if (c.kind == Candidate::Kind::kAdd) return AddP{std::move(p), std::move(n)};
  return Del1P{std::move(p), std::move(n)};
}

struct FalsifierReport {
  NameTree tree, t1, t2;
  std::size_t candidates = 0;  // single-operation candidates
  std::uint64_t pairs = 0;
  std::uint64_t satisfying = 0;
  /// Failing pairs per case label "op2'/op1'".
  std::map<std::string, std::uint64_t> failures_by_case;
  /// One failing pair per case label, with both resulting trees.
  std::map<std::string, std::string> sample_by_case;
  std::vector<std::string> satisfying_pairs;
  bool exhausted = false;

  bool ok() const { return exhausted && satisfying == 0; }
};

/// Enumerates every pair (op1', op2') of candidates and checks TP1 on the
/// scenario: op2'(op1(t)) = op1'(op2(t)).
inline FalsifierReport falsify_del1(std::size_t depth, const FalsifierScenario& s = default_falsifier_scenario()) {
  FalsifierReport r;
  r.tree = s.tree;
  r.t1 = apply_path(s.tree, s.add);
  r.t2 = apply_path(s.tree, s.del);
  const auto space = candidate_space(depth);
  r.candidates = space.size();
  std::vector<PathOp> concrete;
  std::vector<NameTree> on_t1, on_t2;
  for (const auto& c : space) {
    concrete.push_back(instantiate(c, s));
    on_t1.push_back(apply_path(r.t1, concrete.back()));
    on_t2.push_back(apply_path(r.t2, concrete.back()));
  }
  for (std::size_t j = 0; j < space.size(); ++j) {    // op2' runs on t1
    for (std::size_t i = 0; i < space.size(); ++i) {  // op1' runs on t2
      ++r.pairs;
      const std::string label = std::string(case_label(space[j].kind)) + "/" + case_label(space[i].kind);
      if (on_t1[j] == on_t2[i]) {
        ++r.satisfying;
        if (r.satisfying_pairs.size() < 8)
          r.satisfying_pairs.push_back("op1'=" + to_string(space[i]) + " op2'=" + to_string(space[j]));
        continue;
      }
      ++r.failures_by_case[label];
      if (!r.sample_by_case.count(label))
        r.sample_by_case[label] = "op1'=" + to_string(space[i]) + " op2'=" + to_string(space[j]) +
                                  " t1'=" + to_string(on_t1[j]) + " t2'=" + to_string(on_t2[i]);
    }
  }
  r.exhausted = true;
  return r;
}

}  // namespace tree_ot::paths
