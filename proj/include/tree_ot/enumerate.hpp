#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tree_ot/transform.hpp"

namespace tree_ot {

/// Labels used by the enumerators.
inline const std::vector<Label>& sweep_labels() {
  static const std::vector<Label> labels{Label::text("a"), Label::text("b")};
  return labels;
}

namespace detail {

// parent[i] is -2 for data, -1 for mem, otherwise an index in [0, n).
inline bool acyclic(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  for (int i = 0; i < n; ++i) {
    int cur = i;
    for (int steps = 0; cur >= 0; ++steps) {
      if (steps > n) return false;
      cur = parent[cur];
    }
  }
  return true;
}

inline IdTree build_children(const std::vector<int>& parent, const std::vector<Label>& labels,
                             const std::vector<Identifier>& ids, int of) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] == of) edges.push_back(Edge{labels[i], ids[i], build_children(parent, labels, ids, static_cast<int>(i))});
  }
  IdTree out;
  auto& dst = TreeEditor::edges(out);
  dst = std::move(edges);
  std::sort(dst.begin(), dst.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  return out;
}

}  // namespace detail

/// Builds a well-formed tree from a parent vector (-2 data, -1 mem, else an
/// index). Gen identifiers are (0, i+1).
inline WellFormedTree tree_from_parents(const std::vector<int>& parent, const std::vector<Label>& labels) {
  std::vector<Identifier> ids;
  for (std::size_t i = 0; i < parent.size(); ++i) ids.push_back(Identifier::gen(0, static_cast<std::uint32_t>(i + 1)));
  return WellFormedTree(detail::build_children(parent, labels, ids, -2), detail::build_children(parent, labels, ids, -1));
}

/// Calls `visit` on every well-formed tree with exactly `n` Gen identifiers
/// (0;1)..(0;n), every acyclic parent assignment and every labelling.
inline void for_each_tree(std::size_t n, const std::function<void(const WellFormedTree&)>& visit) {
  const auto& alphabet = sweep_labels();
  std::vector<int> parent(n, -2);
  std::vector<std::size_t> label_idx(n, 0);
  std::vector<Label> labels(n);
  const int choices = static_cast<int>(n) + 2;
  while (true) {
    if (detail::acyclic(parent)) {
      std::fill(label_idx.begin(), label_idx.end(), 0);
      while (true) {
        for (std::size_t i = 0; i < n; ++i) labels[i] = alphabet[label_idx[i]];
        visit(tree_from_parents(parent, labels));
        std::size_t k = 0;
        while (k < n && ++label_idx[k] == alphabet.size()) label_idx[k++] = 0;
        if (k == n) break;
      }
    }
    std::size_t k = 0;
    while (k < n) {
      if (++parent[k] == choices - 2) {
        parent[k] = -2;
        ++k;
      } else {
        if (parent[k] == static_cast<int>(k)) continue;  // self-parent is never acyclic
        break;
      }
    }
    if (k == n) break;
  }
}

/// Operations a site could issue on `t`: Nop, Add of a fresh node (site;100)
/// under any existing node, Del/Ren of any Gen node, and Mv of a Gen node
/// under any node outside its own subtree.
inline std::vector<TreeOp> generable_ops(const WellFormedTree& t, std::uint32_t site) {
  std::vector<TreeOp> ops{NopOp{}};
  auto gens = identifiers(t.root());
  std::erase_if(gens, [](Identifier id) { return id.is_reserved(); });
  std::vector<Identifier> all{Identifier::data(), Identifier::mem()};
  all.insert(all.end(), gens.begin(), gens.end());
  const Identifier fresh = Identifier::gen(site, 100);
  for (auto p : all) ops.push_back(AddOp{p, fresh});
  for (auto n : gens) ops.push_back(DelOp{n});
  for (auto n : gens) {
    for (auto p : all) {
      if (!in_subtree(t.root(), n, p)) ops.push_back(MoveOp{n, p, site});
    }
  }
  for (auto n : gens) {
    for (const auto& l : sweep_labels()) ops.push_back(RenameOp{n, l, site});
  }
  return ops;
}

struct SweepReport {
  std::string property;
  std::uint64_t trees = 0;
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> witnesses;

  bool ok() const { return violations == 0; }
};

inline constexpr std::size_t kMaxWitnesses = 8;

/// TP1 over every tree with at most `max_ids` Gen identifiers and every pair
/// of generable operations from sites 1 and 2.
inline SweepReport sweep_tp1(std::size_t max_ids, MoveCycle policy = MoveCycle::kDetachPath) {
  SweepReport report;
  report.property = "TP1";
  for (std::size_t n = 0; n <= max_ids; ++n) {
    for_each_tree(n, [&](const WellFormedTree& t) {
      ++report.trees;
      auto ops1 = generable_ops(t, 1);
      auto ops2 = generable_ops(t, 2);
      std::vector<WellFormedTree> after2;
      after2.reserve(ops2.size());
      for (const auto& op2 : ops2) after2.push_back(apply(t, op2, policy));
      for (const auto& op1 : ops1) {
        auto after1 = apply(t, op1, policy);
        for (std::size_t j = 0; j < ops2.size(); ++j) {
          const auto& op2 = ops2[j];
          ++report.cases;
          auto left = apply(after1, it(op2, op1), policy);
          auto right = apply(after2[j], it(op1, op2), policy);
          bool closed = in_closure(it(op1, op2)) && in_closure(it(op2, op1));
          if (left == right && closed) continue;
          ++report.violations;
          if (report.witnesses.size() < kMaxWitnesses) {
            report.witnesses.push_back("t=" + canonical_serialize(t) + " op1=" + to_string(op1) +
                                       " op2=" + to_string(op2) + " left=" + canonical_serialize(left) +
                                       " right=" + canonical_serialize(right));
          }
        }
      }
    });
  }
  return report;
}

/// TP2 over every tree with at most `max_ids` Gen identifiers and every
/// triple of generable operations, for each assignment of sites 1..3.
inline SweepReport sweep_tp2(std::size_t max_ids) {
  SweepReport report;
  report.property = "TP2";
  static constexpr std::uint32_t kPerms[6][3] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
  for (std::size_t n = 0; n <= max_ids; ++n) {
    for_each_tree(n, [&](const WellFormedTree& t) {
      ++report.trees;
      std::vector<TreeOp> by_site[4];
      for (std::uint32_t s = 1; s <= 3; ++s) by_site[s] = generable_ops(t, s);
      for (const auto& perm : kPerms) {
        const auto& ops = by_site[perm[0]];
        const auto& ops1 = by_site[perm[1]];
        const auto& ops2 = by_site[perm[2]];
        for (const auto& op1 : ops1) {
          for (const auto& op2 : ops2) {
            TreeOp t21 = it(op2, op1);
            TreeOp t12 = it(op1, op2);
            for (const auto& op : ops) {
              ++report.cases;
              TreeOp left = it(it(op, op1), t21);
              TreeOp right = it(it(op, op2), t12);
              if (left == right) continue;
              ++report.violations;
              if (report.witnesses.size() < kMaxWitnesses) {
                report.witnesses.push_back("op=" + to_string(op) + " op1=" + to_string(op1) + " op2=" +
                                           to_string(op2) + " left=" + to_string(left) + " right=" + to_string(right));
              }
            }
          }
        }
      }
    });
  }
  return report;
}

/// Random well-formed tree with `n` Gen identifiers.
inline WellFormedTree random_tree(std::mt19937_64& rng, std::size_t n) {
  std::vector<int> parent(n);
  std::vector<Label> labels(n);
  // Attaching each node to an earlier one (or a root) keeps it acyclic.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pick = rng() % (k + 2);
    parent[order[k]] = pick < 2 ? static_cast<int>(pick) - 2 : static_cast<int>(order[pick - 2]);
    labels[order[k]] = sweep_labels()[rng() % sweep_labels().size()];
  }
  return tree_from_parents(parent, labels);
}

/// Samples (op, ctx) with ctx of size 1..max_ctx, all generated on one random
/// tree by distinct sites, and compares it_star over every permutation of ctx.
inline SweepReport sample_it_star(std::size_t samples, std::size_t max_ctx, std::uint64_t seed,
                                  std::size_t max_ids = 4) {
  SweepReport report;
  report.property = "IT* permutation invariance";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    auto t = random_tree(rng, rng() % (max_ids + 1));
    ++report.trees;
    std::size_t size = 1 + rng() % max_ctx;
    auto pick = [&](std::uint32_t site) {
      auto ops = generable_ops(t, site);
      return ops[rng() % ops.size()];
    };
    TreeOp op = pick(1);
    std::vector<TreeOp> ctx;
    for (std::size_t k = 0; k < size; ++k) ctx.push_back(pick(static_cast<std::uint32_t>(k + 2)));
    std::vector<std::size_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    const TreeOp expected = it_star(op, ctx);
    do {
      ++report.cases;
      std::vector<TreeOp> permuted;
      for (auto k : perm) permuted.push_back(ctx[k]);
      TreeOp got = it_star(op, permuted);
      if (got == expected) continue;
      ++report.violations;
      if (report.witnesses.size() < kMaxWitnesses) {
        std::string w = "op=" + to_string(op) + " ctx=[";
        for (std::size_t k = 0; k < ctx.size(); ++k) w += (k ? "," : "") + to_string(ctx[k]);
        w += "] order=[";
        for (std::size_t k = 0; k < perm.size(); ++k) w += (k ? "," : "") + std::to_string(perm[k]);
        w += "] expected=" + to_string(expected) + " got=" + to_string(got);
        report.witnesses.push_back(std::move(w));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return report;
}

}  // namespace tree_ot
