#include <gtest/gtest.h>

#include "tree_ot/composition.hpp"

using namespace tree_ot;

namespace {

Identifier g(std::uint32_t s, std::uint32_t n) { return Identifier::gen(s, n); }

WordOp ins(std::uint32_t site, std::uint32_t opnb, char ch) { return InsertAfter{std::nullopt, Stamp{site, opnb}, ch}; }

LabeledTreeState with_nodes() {
  LabeledTreeState s;
  s = composed_do(s, TreeSide{AddOp{Identifier::data(), g(1, 1)}});
  s = composed_do(s, TreeSide{AddOp{g(1, 1), g(1, 2)}});
  return s;
}

}  // namespace

TEST(ComposedDo, NopKeepsState) {
  auto s = with_nodes();
  EXPECT_EQ(composed_do(s, TreeSide{NopOp{}}), s);
}

TEST(ComposedDo, NewNodesStartEmpty) {
  auto s = with_nodes();
  ASSERT_EQ(s.delta.size(), 2u);
  EXPECT_EQ(s.delta.at(g(1, 1)), WordState{});
  EXPECT_EQ(s.delta.at(g(1, 2)), WordState{});
}

TEST(ComposedDo, WordOpTouchesOneWord) {
  auto s = with_nodes();
  auto out = composed_do(s, DataSide{g(1, 2), ins(1, 3, 'a')});
  EXPECT_EQ(out.tree, s.tree);
  EXPECT_EQ(out.delta.at(g(1, 2)).visible_word(), "a");
  EXPECT_EQ(out.delta.at(g(1, 1)), s.delta.at(g(1, 1)));
}

TEST(ComposedDo, WordOpOnAbsentNodeIsIgnored) {
  auto s = with_nodes();
  EXPECT_EQ(composed_do(s, DataSide{g(9, 9), ins(1, 3, 'a')}), s);
}

TEST(ComposedDo, DeleteDropsWordButKeepsChildWords) {
  auto s = with_nodes();
  s = composed_do(s, DataSide{g(1, 1), ins(1, 3, 'p')});
  s = composed_do(s, DataSide{g(1, 2), ins(1, 4, 'c')});
  auto out = composed_do(s, TreeSide{DelOp{g(1, 1)}});
  EXPECT_FALSE(out.delta.count(g(1, 1)));
  EXPECT_EQ(out.delta.at(g(1, 2)).visible_word(), "c");
  EXPECT_TRUE(out.tree.memory().contains(g(1, 2)));
}

TEST(ComposedDo, TreeAndWordOpsCommuteOnSurvivingNodes) {
  auto s = with_nodes();
  ComposedOp tree_op = TreeSide{MoveOp{g(1, 2), Identifier::data(), 1}};
  ComposedOp word_op = DataSide{g(1, 2), ins(2, 1, 'w')};
  EXPECT_EQ(composed_do(composed_do(s, tree_op), word_op), composed_do(composed_do(s, word_op), tree_op));
}

TEST(ComposedDo, Serialization) {
  auto s = composed_do(with_nodes(), DataSide{g(1, 2), ins(1, 3, 'a')});
  EXPECT_EQ(canonical_serialize(s), "[(^,data)[(#,1;1|<>)[(#,1;2|<1;3:'a'+>)[]]](^,mem)[]]");
}

TEST(Environment, LocalRequestsRouteToOneSide) {
  ComposedEnvironment env;
  auto r1 = env.route_local({1, 1}, TreeSide{AddOp{Identifier::data(), g(1, 1)}});
  ASSERT_TRUE(std::holds_alternative<TreeRequest>(r1));
  EXPECT_TRUE(std::get<TreeRequest>(r1).past.empty());
  EXPECT_TRUE(env.words().empty());
  const auto tree_before = env.tree().history().size();
  auto r2 = env.route_local({1, 2}, DataSide{g(1, 1), ins(1, 2, 'x')});
  ASSERT_TRUE(std::holds_alternative<WordRequest>(r2));
  EXPECT_EQ(env.tree().history().size(), tree_before);
  EXPECT_EQ(env.state().delta.at(g(1, 1)).visible_word(), "x");
  auto r3 = env.route_local({1, 3}, TreeSide{NopOp{}});
  EXPECT_EQ(std::get<TreeRequest>(r3).past, (std::set<RequestId>{{1, 1}}));
  EXPECT_EQ(request_id(r3), (RequestId{1, 3}));
}

TEST(Environment, LocalWordOpNeedsLiveNode) {
  ComposedEnvironment env;
  EXPECT_THROW(env.route_local({1, 1}, DataSide{g(9, 9), ins(1, 1, 'x')}), std::invalid_argument);
  env.route_local({1, 2}, TreeSide{AddOp{Identifier::data(), g(1, 2)}});
  EXPECT_THROW(env.route_local({1, 3}, DataSide{g(1, 2), Hide{Stamp{7, 7}}}), std::invalid_argument);
}

TEST(Environment, ExternalRequestsChangeOneSide) {
  ComposedEnvironment env;
  env.route_external(TreeRequest{{2, 1}, AddOp{Identifier::data(), g(2, 1)}, {}});
  auto words = env.words();
  EXPECT_TRUE(env.state().tree.contains(g(2, 1)));
  EXPECT_EQ(env.words(), words);
  env.route_external(WordRequest{{2, 2}, g(2, 1), ins(2, 2, 'q')});
  EXPECT_EQ(env.tree().history().size(), 1u);
  EXPECT_EQ(env.state().delta.at(g(2, 1)).visible_word(), "q");
}

TEST(Environment, WordReplicaOutlivesItsNode) {
  ComposedEnvironment env;
  env.route_external(TreeRequest{{2, 1}, AddOp{Identifier::data(), g(2, 1)}, {}});
  env.route_external(TreeRequest{{3, 1}, DelOp{g(2, 1)}, {{2, 1}}});
  EXPECT_FALSE(env.state().delta.count(g(2, 1)));
  env.route_external(WordRequest{{2, 2}, g(2, 1), ins(2, 2, 'q')});
  env.route_external(WordRequest{{2, 3}, g(2, 1), InsertAfter{Stamp{2, 2}, Stamp{2, 3}, 'r'}});
  EXPECT_EQ(env.words().at(g(2, 1)).visible_word(), "qr");
  EXPECT_FALSE(env.state().delta.count(g(2, 1)));
}
