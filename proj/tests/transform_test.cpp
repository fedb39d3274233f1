#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tree_ot/enumerate.hpp"

using namespace tree_ot;

namespace {

Identifier g(std::uint32_t s, std::uint32_t n) { return Identifier::gen(s, n); }

// Direct transcription of the recursive definition.
TreeOp it_star_recursive(const TreeOp& op, std::vector<TreeOp> ctx) {
  if (ctx.empty()) return op;
  TreeOp last = ctx.back();
  ctx.pop_back();
  return it(it_star_recursive(op, ctx), it_star_recursive(last, ctx));
}

const Label kX = Label::text("x");
const Label kY = Label::text("y");

}  // namespace

TEST(It, AddAgainstDel) {
  const auto p = g(1, 1), id = g(2, 1);
  EXPECT_EQ(it(AddOp{p, id}, DelOp{id}), TreeOp(NopOp{}));
  EXPECT_EQ(it(AddOp{p, id}, DelOp{p}), TreeOp(AddOp{Identifier::mem(), id}));
  EXPECT_EQ(it(AddOp{p, id}, DelOp{g(3, 1)}), TreeOp(AddOp{p, id}));
}

TEST(It, NopOnEitherSide) {
  const std::vector<TreeOp> ops{NopOp{},          AddOp{Identifier::data(), g(1, 1)}, DelOp{g(1, 1)},
                                MoveOp{g(1, 1), g(1, 2), 1}, RenameOp{g(1, 1), kX, 1}};
  for (const auto& op : ops) {
    EXPECT_EQ(it(op, NopOp{}), op) << to_string(op);
    EXPECT_EQ(it(NopOp{}, op), TreeOp(NopOp{})) << to_string(op);
  }
}

TEST(It, RenamePriority) {
  const auto id = g(1, 1);
  EXPECT_EQ(it(RenameOp{id, kX, 2}, RenameOp{id, kY, 1}), TreeOp(NopOp{}));
  EXPECT_EQ(it(RenameOp{id, kY, 1}, RenameOp{id, kX, 2}), TreeOp(RenameOp{id, kY, 1}));
  EXPECT_EQ(it(RenameOp{id, kX, 2}, RenameOp{g(1, 2), kY, 1}), TreeOp(RenameOp{id, kX, 2}));
  EXPECT_EQ(it(RenameOp{id, kX, 2}, DelOp{id}), TreeOp(RenameOp{id, kX, 2}));
}

TEST(It, MovePriorityAndDelete) {
  const auto a = g(1, 1), b = g(1, 2), c = g(1, 3);
  EXPECT_EQ(it(MoveOp{a, b, 2}, MoveOp{a, c, 1}), TreeOp(NopOp{}));
  EXPECT_EQ(it(MoveOp{a, c, 1}, MoveOp{a, b, 2}), TreeOp(MoveOp{a, c, 1}));
  EXPECT_EQ(it(MoveOp{a, b, 2}, MoveOp{b, a, 1}), TreeOp(MoveOp{a, b, 2}));
  EXPECT_EQ(it(MoveOp{a, b, 2}, DelOp{b}), TreeOp(MoveOp{a, Identifier::mem(), 2}));
  EXPECT_EQ(it(MoveOp{a, b, 2}, DelOp{a}), TreeOp(NopOp{}));
  EXPECT_EQ(it(MoveOp{a, b, 2}, DelOp{c}), TreeOp(MoveOp{a, b, 2}));
  EXPECT_EQ(it(MoveOp{a, b, 2}, AddOp{b, c}), TreeOp(MoveOp{a, b, 2}));
}

TEST(It, DelAndAddPassThrough) {
  const auto a = g(1, 1), b = g(1, 2);
  EXPECT_EQ(it(DelOp{a}, DelOp{a}), TreeOp(DelOp{a}));
  EXPECT_EQ(it(DelOp{a}, AddOp{a, b}), TreeOp(DelOp{a}));
  EXPECT_EQ(it(DelOp{a}, MoveOp{a, b, 1}), TreeOp(DelOp{a}));
  EXPECT_EQ(it(AddOp{a, b}, MoveOp{a, Identifier::mem(), 1}), TreeOp(AddOp{a, b}));
  EXPECT_EQ(it(AddOp{a, b}, AddOp{a, g(2, 1)}), TreeOp(AddOp{a, b}));
}

TEST(It, SameSiteTieIsRejected) {
  const auto a = g(1, 1);
  EXPECT_THROW(it(RenameOp{a, kX, 1}, RenameOp{a, kY, 1}), std::logic_error);
  EXPECT_THROW(it(MoveOp{a, g(1, 2), 1}, MoveOp{a, g(1, 3), 1}), std::logic_error);
}

TEST(ItStar, BaseCases) {
  const TreeOp op = AddOp{g(1, 1), g(2, 1)};
  EXPECT_EQ(it_star(op, {}), op);
  EXPECT_EQ(it_star(op, {DelOp{g(1, 1)}}), it(op, DelOp{g(1, 1)}));
}

TEST(ItStar, MatchesRecursiveDefinition) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    auto t = random_tree(rng, rng() % 5);
    const std::size_t size = 1 + rng() % 5;
    std::vector<TreeOp> ctx;
    for (std::uint32_t s = 2; s < 2 + size; ++s) {
      auto ops = generable_ops(t, s);
      ctx.push_back(ops[rng() % ops.size()]);
    }
    auto ops = generable_ops(t, 1);
    TreeOp op = ops[rng() % ops.size()];
    ASSERT_EQ(it_star(op, ctx), it_star_recursive(op, ctx)) << to_string(op);
  }
}

TEST(ItStar, PermutationInvarianceSample) {
  auto r = sample_it_star(500, 4, 9);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.cases, 500u);
}

TEST(Tp1, SmallExamples) {
  WellFormedTree t(IdTree({Edge{Label::no_value(), g(2, 1), {}}}), IdTree{});
  EXPECT_TRUE(check_tp1(t, NopOp{}, NopOp{}).ok);
  auto r = check_tp1(t, RenameOp{g(2, 1), kX, 1}, DelOp{g(2, 1)});
  EXPECT_TRUE(r.ok) << r.left << " vs " << r.right;
  EXPECT_FALSE(apply(apply(t, DelOp{g(2, 1)}), RenameOp{g(2, 1), kX, 1}).contains(g(2, 1)));
}

TEST(Tp1, SweepUpToThreeIds) {
  for (auto policy : {MoveCycle::kDetachPath, MoveCycle::kDrop}) {
    auto r = sweep_tp1(3, policy);
    EXPECT_EQ(r.violations, 0u) << (r.witnesses.empty() ? "" : r.witnesses.front());
    EXPECT_EQ(r.trees, 1u + 4u + 32u + 400u);
  }
}

TEST(Tp2, DistinctIdsExample) {
  const TreeOp op = AddOp{g(1, 1), g(1, 2)};
  const TreeOp op1 = AddOp{g(2, 1), g(2, 2)};
  const TreeOp op2 = DelOp{g(3, 1)};
  auto r = check_tp2(op, op1, op2);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.left, op);
  EXPECT_TRUE(check_tp2(NopOp{}, NopOp{}, NopOp{}).ok);
}

TEST(Tp2, SweepUpToTwoIds) {
  auto r = sweep_tp2(2);
  EXPECT_EQ(r.violations, 0u) << (r.witnesses.empty() ? "" : r.witnesses.front());
  EXPECT_GT(r.cases, 0u);
}

TEST(Closure, TransformedOperationsStayInTheSet) {
  for (std::size_t n = 0; n <= 3; ++n) {
    for_each_tree(n, [&](const WellFormedTree& t) {
      auto ops1 = generable_ops(t, 1), ops2 = generable_ops(t, 2);
      for (const auto& a : ops1) {
        for (const auto& b : ops2) {
          ASSERT_TRUE(in_closure(it(a, b))) << to_string(a) << " / " << to_string(b);
          ASSERT_TRUE(in_closure(it(b, a))) << to_string(b) << " / " << to_string(a);
        }
      }
    });
  }
}

TEST(GenerableOps, ExcludeMovesIntoOwnSubtree) {
  WellFormedTree t(IdTree({Edge{Label::no_value(), g(1, 1), IdTree({Edge{Label::no_value(), g(1, 2), {}}})}}),
                   IdTree{});
  auto ops = generable_ops(t, 2);
  EXPECT_EQ(std::count(ops.begin(), ops.end(), TreeOp(MoveOp{g(1, 1), g(1, 2), 2})), 0);
  EXPECT_EQ(std::count(ops.begin(), ops.end(), TreeOp(MoveOp{g(1, 2), Identifier::mem(), 2})), 1);
  EXPECT_EQ(std::count(ops.begin(), ops.end(), TreeOp(AddOp{Identifier::mem(), g(2, 100)})), 1);
}
