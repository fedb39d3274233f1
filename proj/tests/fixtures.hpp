#pragma once

#include <string>
#include <vector>

#include "tree_ot/simulator.hpp"

// Hand-evaluated concurrent scenarios with their expected final states.
namespace fixtures {

using namespace tree_ot;
using namespace tree_ot::sim;

inline Identifier g(std::uint32_t site, std::uint32_t opnb) { return Identifier::gen(site, opnb); }

inline Edge node(Identifier id, std::vector<Edge> kids = {}, Label label = Label::no_value()) {
  return Edge{std::move(label), id, IdTree(std::move(kids))};
}

/// Expected composed state with an empty word on every Gen node.
inline LabeledTreeState expect(std::vector<Edge> doc, std::vector<Edge> mem) {
  LabeledTreeState s{WellFormedTree(IdTree(std::move(doc)), IdTree(std::move(mem))), {}};
  for (auto id : identifiers(s.tree.root()))
    if (id.is_gen()) s.delta[id] = WordState{};
  return s;
}

inline ScriptEntry op(std::uint32_t site, LocalOp o) { return ScriptedOp{site, std::nullopt, std::move(o)}; }

struct AdversarialCase {
  std::string name;
  Scenario scenario;
  LabeledTreeState expected;
};

inline Scenario two_sites(std::vector<ScriptEntry> script, MoveCycle policy = MoveCycle::kDetachPath) {
  Scenario sc;
  sc.seed = 11;
  sc.sites = 2;
  sc.schedule = SchedulePolicy::kOpsFirst;
  sc.move_policy = policy;
  sc.script = std::move(script);
  return sc;
}

inline std::vector<AdversarialCase> adversarial_cases() {
  const auto data = Identifier::data();
  const auto a = g(1, 1), b = g(1, 2);
  std::vector<AdversarialCase> out;

  // a and b swap parents concurrently; each side finds the destination
  // inside the moved subtree and splits the path under mem.
  out.push_back({"mv-cycle-detach",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{data}), Sync{}, op(1, MoveLocal{a, b}),
                            op(2, MoveLocal{b, a})}),
                 expect({}, {node(a), node(b)})});

  // Same race with erase-then-insert semantics: both subtrees vanish.
  out.push_back({"mv-cycle-drop",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{data}), Sync{}, op(1, MoveLocal{a, b}),
                            op(2, MoveLocal{b, a})},
                           MoveCycle::kDrop),
                 expect({}, {})});

  // Concurrent moves of one node: the lower site keeps its destination.
  out.push_back({"mv-mv-same-node",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{data}), op(1, AddLocal{data}), Sync{},
                            op(1, MoveLocal{g(1, 3), a}), op(2, MoveLocal{g(1, 3), b})}),
                 expect({node(a, {node(g(1, 3))}), node(b)}, {})});

  // Add under a parent deleted concurrently lands under mem.
  out.push_back({"add-under-del",
                 two_sites({op(1, AddLocal{data}), Sync{}, op(1, DelLocal{a}), op(2, AddLocal{a})}),
                 expect({}, {node(g(2, 1))})});

  // Ren/Ren on one node: site 1 wins on both replicas.
  out.push_back({"ren-duel",
                 two_sites({op(1, AddLocal{data}), Sync{}, op(1, RenameLocal{a, "x"}), op(2, RenameLocal{a, "y"})}),
                 expect({node(a, {}, Label::text("x"))}, {})});

  // Both sites delete the same node; the second Del finds nothing.
  out.push_back({"double-del",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{a}), Sync{}, op(1, DelLocal{a}), op(2, DelLocal{a})}),
                 expect({}, {node(b)})});

  // A move under a concurrently deleted parent ends up under mem.
  out.push_back({"mv-under-del",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{data}), Sync{}, op(1, DelLocal{a}),
                            op(2, MoveLocal{b, a})}),
                 expect({}, {node(b)})});

  // A move of a concurrently deleted node is dropped.
  out.push_back({"mv-of-del",
                 two_sites({op(1, AddLocal{data}), op(1, AddLocal{data}), Sync{}, op(1, DelLocal{b}),
                            op(2, MoveLocal{b, a})}),
                 expect({node(a)}, {})});
  return out;
}

}  // namespace fixtures
