#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "tree_ot/word.hpp"

using namespace tree_ot;

namespace {

Stamp st(std::uint32_t s, std::uint32_t n) { return Stamp{s, n}; }

WordState run(std::initializer_list<WordOp> ops) {
  WordState s;
  for (const auto& op : ops) s = word_apply(s, op);
  return s;
}

// Reference ordering: elements form a tree by anchor; children are visited
// by descending id, each followed by its own subtree.
std::string oracle_word(const std::vector<InsertAfter>& inserts, const std::set<Stamp>& hidden) {
  std::map<std::optional<Stamp>, std::vector<const InsertAfter*>> kids;
  for (const auto& ins : inserts) kids[ins.anchor].push_back(&ins);
  std::string out;
  std::function<void(std::optional<Stamp>)> walk = [&](std::optional<Stamp> at) {
    auto it = kids.find(at);
    if (it == kids.end()) return;
    auto list = it->second;
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return b->id < a->id; });
    for (const auto* ins : list) {
      if (!hidden.count(ins->id)) out.push_back(ins->ch);
      walk(ins->id);
    }
  };
  walk(std::nullopt);
  return out;
}

}  // namespace

TEST(Word, InsertIntoEmpty) {
  auto s = run({InsertAfter{std::nullopt, st(1, 1), 'a'}});
  EXPECT_EQ(s.visible_word(), "a");
  EXPECT_EQ(canonical_serialize(s), "<1;1:'a'+>");
}

TEST(Word, ConcurrentHeadInsertsOrderByDescendingId) {
  WordOp a = InsertAfter{std::nullopt, st(1, 1), 'a'};
  WordOp b = InsertAfter{std::nullopt, st(2, 1), 'b'};
  auto ab = run({a, b});
  auto ba = run({b, a});
  EXPECT_EQ(ab, ba);
  EXPECT_EQ(ab.visible_word(), "ba");
}

TEST(Word, HideCommutesWithInsertAfterHidden) {
  WordOp e = InsertAfter{std::nullopt, st(1, 1), 'e'};
  WordOp hide = Hide{st(1, 1)};
  WordOp ins = InsertAfter{st(1, 1), st(2, 1), 'x'};
  auto one = run({e, hide, ins});
  auto two = run({e, ins, hide});
  EXPECT_EQ(one, two);
  EXPECT_EQ(one.visible_word(), "x");
  EXPECT_TRUE(one.contains(st(1, 1)));
  EXPECT_EQ(canonical_serialize(one), "<1;1:'e'-,2;1:'x'+>");
}

TEST(Word, ReapplyIsNoOp) {
  WordOp a = InsertAfter{std::nullopt, st(1, 1), 'a'};
  auto s = run({a, a, Hide{st(1, 1)}, Hide{st(1, 1)}});
  EXPECT_EQ(s.elements().size(), 1u);
  EXPECT_EQ(s.visible_word(), "");
}

TEST(Word, UnknownAnchorThrows) {
  EXPECT_FALSE(word_applicable(WordState{}, Hide{st(1, 1)}));
  EXPECT_THROW(word_apply(WordState{}, InsertAfter{st(1, 1), st(1, 2), 'x'}), std::logic_error);
}

TEST(WordNormalize, Positions) {
  EXPECT_EQ(word_normalize(WordState{}, InsCh{0, 'x'}, st(1, 1)), WordOp(InsertAfter{std::nullopt, st(1, 1), 'x'}));
  auto ab = run({InsertAfter{std::nullopt, st(1, 1), 'a'}, InsertAfter{st(1, 1), st(1, 2), 'b'}});
  ASSERT_EQ(ab.visible_word(), "ab");
  EXPECT_EQ(word_normalize(ab, DelCh{1}, st(1, 3)), WordOp(Hide{st(1, 2)}));
  EXPECT_EQ(word_normalize(ab, InsCh{2, 'z'}, st(1, 3)), WordOp(InsertAfter{st(1, 2), st(1, 3), 'z'}));
  EXPECT_THROW(word_normalize(ab, InsCh{3, 'z'}, st(1, 3)), std::out_of_range);
  EXPECT_THROW(word_normalize(ab, DelCh{2}, st(1, 3)), std::out_of_range);
}

TEST(WordNormalize, SkipsTombstones) {
  auto s = run({InsertAfter{std::nullopt, st(1, 1), 'a'}, InsertAfter{st(1, 1), st(1, 2), 'b'}, Hide{st(1, 1)}});
  ASSERT_EQ(s.visible_word(), "b");
  EXPECT_EQ(word_normalize(s, DelCh{0}, st(1, 3)), WordOp(Hide{st(1, 2)}));
}

TEST(WordProperty, ConcurrentOpsCommuteInEveryOrder) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    WordState base;
    const std::uint32_t prefix = rng() % 5;
    for (std::uint32_t k = 1; k <= prefix; ++k)
      base = word_apply(base, word_normalize(base, InsCh{rng() % (base.visible_size() + 1), 'a'}, st(9, k)));
    std::vector<WordOp> ops;
    for (std::uint32_t site = 1; site <= 4; ++site) {
      const bool del = base.visible_size() > 0 && rng() % 3 == 0;
      PositionalWordOp p = del ? PositionalWordOp(DelCh{rng() % base.visible_size()})
                               : PositionalWordOp(InsCh{rng() % (base.visible_size() + 1), char('a' + site)});
      ops.push_back(word_normalize(base, p, st(site, 1)));
    }
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::optional<WordState> first;
    do {
      WordState s = base;
      for (auto i : perm) s = word_apply(s, ops[i]);
      if (!first) first = s;
      ASSERT_EQ(s, *first);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(WordProperty, ReplicasMatchTreeWalkOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t sites = 2 + rng() % 3;
    std::vector<WordState> replicas(sites);
    std::vector<std::vector<bool>> has(sites);
    std::vector<WordOp> log;
    std::vector<std::uint32_t> counters(sites, 0);
    auto catch_up = [&](std::uint32_t r) {
      for (std::size_t i = 0; i < log.size(); ++i) {
        if (has[r].size() <= i) has[r].resize(i + 1, false);
        if (has[r][i]) continue;
        replicas[r] = word_apply(replicas[r], log[i]);
        has[r][i] = true;
      }
    };
    for (int step = 0; step < 30; ++step) {
      const std::uint32_t r = rng() % sites;
      if (rng() % 4 == 0) {
        catch_up(r);
        continue;
      }
      auto& s = replicas[r];
      PositionalWordOp p = (s.visible_size() && rng() % 3 == 0)
                               ? PositionalWordOp(DelCh{rng() % s.visible_size()})
                               : PositionalWordOp(InsCh{rng() % (s.visible_size() + 1), char('a' + rng() % 26)});
      auto op = word_normalize(s, p, st(r + 1, ++counters[r]));
      s = word_apply(s, op);
      log.push_back(op);
      has[r].resize(log.size(), false);
      has[r].back() = true;
    }
    std::vector<InsertAfter> inserts;
    std::set<Stamp> hidden;
    for (const auto& op : log) {
      if (const auto* ins = std::get_if<InsertAfter>(&op)) inserts.push_back(*ins);
      else hidden.insert(std::get<Hide>(op).id);
    }
    const auto expected = oracle_word(inserts, hidden);
    for (std::uint32_t r = 0; r < sites; ++r) {
      catch_up(r);
      EXPECT_EQ(replicas[r].visible_word(), expected);
      EXPECT_EQ(replicas[r], replicas[0]);
    }
  }
}
