#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tree_ot/transform.hpp"

namespace tree_ot {

/// Tree-side editing algorithm of one replica. Keeps the executed history
/// and brings each incoming operation from the context it was generated in
/// to the current one.
class TreeIntegrator {
 public:
  struct Entry {
    RequestId id;
    TreeOp op;                   // as generated
    std::set<RequestId> past;    // tree requests in its causal past
    TreeOp executed;             // form applied here
  };

  explicit TreeIntegrator(MoveCycle policy = MoveCycle::kDetachPath) : policy_(policy) {}

  const WellFormedTree& state() const { return state_; }
  const std::vector<Entry>& history() const { return entries_; }
  MoveCycle policy() const { return policy_; }
  bool has(RequestId id) const { return index_.count(id) != 0; }

  std::set<RequestId> executed_ids() const {
    std::set<RequestId> out;
    for (const auto& e : entries_) out.insert(e.id);
    return out;
  }

  /// Operation generated here on the current state.
  const Entry& integrate_local(RequestId id, const TreeOp& op) { return integrate(id, op, executed_ids()); }

  /// Throws std::logic_error when part of `past` has not been executed here
  /// or `id` was already integrated.
  const Entry& integrate(RequestId id, const TreeOp& op, const std::set<RequestId>& past) {
    if (has(id)) throw std::logic_error("TreeIntegrator: request " + id.to_string() + " integrated twice");
    Bits past_bits;
    for (auto p : past) {
      auto it = index_.find(p);
      if (it == index_.end()) throw std::logic_error("TreeIntegrator: causal past of " + id.to_string() + " not executed");
      past_bits.set(it->second);
    }
    const std::size_t q = entries_.size();
    entries_.push_back(Entry{id, op, past, NopOp{}});
    past_bits_.push_back(std::move(past_bits));
    index_[id] = q;
    Bits ctx;
    for (std::size_t i = 0; i < q; ++i) ctx.set(i);
    entries_[q].executed = translate(q, ctx, nullptr, memo_);
    state_ = apply(state_, entries_[q].executed, policy_);
    return entries_[q];
  }

  /// Integration order: Kahn's algorithm picking the smallest (site, opnb)
  /// among requests whose past is already placed.
  std::vector<std::size_t> canonical_order() const {
    std::vector<std::size_t> order;
    Bits placed;
    while (order.size() < entries_.size()) {
      std::size_t best = entries_.size();
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (placed.test(i) || !past_bits_[i].subset_of(placed)) continue;
        if (best == entries_.size() || entries_[i].id < entries_[best].id) best = i;
      }
      placed.set(best);
      order.push_back(best);
    }
    return order;
  }

  /// State obtained by integrating the same requests in canonical order.
  /// Equal to state() whenever the transformation is order-independent.
  WellFormedTree replay_canonical() const {
    auto order = canonical_order();
    Memo memo;
    WellFormedTree t;
    Bits ctx;
    for (auto q : order) {
      t = apply(t, translate(q, ctx, &order, memo), policy_);
      ctx.set(q);
    }
    return t;
  }

 private:
  /// Set of history indices.
  struct Bits {
    std::vector<std::uint64_t> words;

    bool test(std::size_t i) const { return i / 64 < words.size() && (words[i / 64] >> (i % 64) & 1u); }
    void set(std::size_t i) {
      if (i / 64 >= words.size()) words.resize(i / 64 + 1, 0);
      words[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    bool subset_of(const Bits& o) const {
      for (std::size_t w = 0; w < words.size(); ++w)
        if (words[w] & ~(w < o.words.size() ? o.words[w] : 0)) return false;
      return true;
    }
    /// Members of this set missing from `o`, ascending.
    std::vector<std::size_t> minus(const Bits& o) const {
      std::vector<std::size_t> out;
      for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t x = words[w] & ~(w < o.words.size() ? o.words[w] : 0);
        while (x) {
          out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
          x &= x - 1;
        }
      }
      return out;
    }
    void trim() {
      while (!words.empty() && words.back() == 0) words.pop_back();
    }
    friend auto operator<=>(const Bits&, const Bits&) = default;
  };
  using Memo = std::map<std::pair<std::size_t, Bits>, TreeOp>;

  /// Form of request q defined after exactly the requests in ctx, which
  /// contains q's past and not q. Missing requests are included one at a
  /// time following `order` (history order when null), each first brought
  /// to the context reached so far.
  TreeOp translate(std::size_t q, const Bits& ctx, const std::vector<std::size_t>* order, Memo& memo) const {
    Bits key_bits = ctx;
    key_bits.trim();
    auto key = std::make_pair(q, std::move(key_bits));
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    TreeOp result = entries_[q].op;
    Bits cur = past_bits_[q];
    auto missing = ctx.minus(cur);
    if (order) {
      std::vector<std::size_t> ranked;
      for (auto r : *order)
        if (std::binary_search(missing.begin(), missing.end(), r)) ranked.push_back(r);
      missing = std::move(ranked);
    }
    for (auto r : missing) {
      result = it(result, translate(r, cur, order, memo));
      cur.set(r);
    }
    memo.emplace(std::move(key), result);
    return result;
  }

  MoveCycle policy_;
  WellFormedTree state_;
  std::vector<Entry> entries_;
  std::vector<Bits> past_bits_;
  std::map<RequestId, std::size_t> index_;
  Memo memo_;
};

}  // namespace tree_ot
