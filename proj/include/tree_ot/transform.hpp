#pragma once

#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tree_ot/tree.hpp"

namespace tree_ot {

namespace detail {

[[noreturn]] inline void same_site_tie(const TreeOp& a, const TreeOp& b) {
  throw std::logic_error("it: concurrent operations on one node from the same site: " + to_string(a) + " / " +
                         to_string(b));
}

}  // namespace detail

/// Integration transformation: rewrites `op1` so that it can be executed
/// after the concurrent `op2`.
inline TreeOp it(const TreeOp& op1, const TreeOp& op2) {
  if (is_nop(op1)) return NopOp{};
  if (is_nop(op2)) return op1;

  if (const auto* add = std::get_if<AddOp>(&op1)) {
    if (const auto* del = std::get_if<DelOp>(&op2)) {
      if (add->node == del->node) return NopOp{};
      if (add->parent == del->node) return AddOp{Identifier::mem(), add->node};
    }
    return op1;
  }
  if (std::holds_alternative<DelOp>(op1)) return op1;
  if (const auto* ren = std::get_if<RenameOp>(&op1)) {
    if (const auto* other = std::get_if<RenameOp>(&op2); other && other->node == ren->node) {
      if (other->site == ren->site) detail::same_site_tie(op1, op2);
      if (other->site < ren->site) return NopOp{};
    }
    return op1;
  }
  const auto& mv = std::get<MoveOp>(op1);
  if (const auto* other = std::get_if<MoveOp>(&op2); other && other->node == mv.node) {
    if (other->site == mv.site) detail::same_site_tie(op1, op2);
    if (other->site < mv.site) return NopOp{};
  }
  if (const auto* del = std::get_if<DelOp>(&op2)) {
    if (mv.parent == del->node) return MoveOp{mv.node, Identifier::mem(), mv.site};
    if (mv.node == del->node) return NopOp{};
  }
  return op1;
}

/// IT over a set of concurrent operations:
/// it_star(op, [o1..on]) = it(it_star(op, [o1..on-1]), it_star(on, [o1..on-1])).
inline TreeOp it_star(const TreeOp& op, const std::vector<TreeOp>& ctx) {
  // prefix[k] holds ctx[k] transformed against ctx[0..k-1].
  std::vector<TreeOp> prefix;
  prefix.reserve(ctx.size());
  TreeOp result = op;
  for (std::size_t n = 0; n < ctx.size(); ++n) {
    // it_star(ctx[n], ctx[0..n-1]) folds ctx[n] through the earlier
    // transformed members, mirroring how `result` is folded.
    TreeOp folded = ctx[n];
    for (std::size_t k = 0; k < n; ++k) folded = it(folded, prefix[k]);
    result = it(result, folded);
    prefix.push_back(std::move(folded));
  }
  return result;
}

/// True when `transformed` may be produced by IT: the operation is valid and
/// reserved identifiers appear only as Add/Mv destinations.
inline bool in_closure(const TreeOp& transformed) { return is_valid(transformed); }

struct Tp1Result {
  bool ok = true;
  std::string left;
  std::string right;
};

inline Tp1Result check_tp1(const WellFormedTree& t, const TreeOp& op1, const TreeOp& op2,
                           MoveCycle policy = MoveCycle::kDetachPath) {
  auto left = apply(apply(t, op1, policy), it(op2, op1), policy);
  auto right = apply(apply(t, op2, policy), it(op1, op2), policy);
  if (left == right) return {};
  return {false, canonical_serialize(left), canonical_serialize(right)};
}

struct Tp2Result {
  bool ok = true;
  TreeOp left;
  TreeOp right;
};

inline Tp2Result check_tp2(const TreeOp& op, const TreeOp& op1, const TreeOp& op2) {
  TreeOp left = it(it(op, op1), it(op2, op1));
  TreeOp right = it(it(op, op2), it(op1, op2));
  return {left == right, left, right};
}

}  // namespace tree_ot
