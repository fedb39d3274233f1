#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tree_ot/composition.hpp"

namespace tree_ot::sim {

// ---------------------------------------------------------------------------
// Script vocabulary

struct NopLocal {
  friend bool operator==(const NopLocal&, const NopLocal&) = default;
};
/// The new node is named after the request: (site;opnb).
struct AddLocal {
  Identifier parent;
  friend bool operator==(const AddLocal&, const AddLocal&) = default;
};
struct DelLocal {
  Identifier node;
  friend bool operator==(const DelLocal&, const DelLocal&) = default;
};
struct MoveLocal {
  Identifier node;
  Identifier parent;
  friend bool operator==(const MoveLocal&, const MoveLocal&) = default;
};
struct RenameLocal {
  Identifier node;
  std::string label;
  friend bool operator==(const RenameLocal&, const RenameLocal&) = default;
};
struct InsLocal {
  Identifier node;
  std::size_t pos = 0;
  char ch = 'a';
  friend bool operator==(const InsLocal&, const InsLocal&) = default;
};
struct DelChLocal {
  Identifier node;
  std::size_t pos = 0;
  friend bool operator==(const DelChLocal&, const DelChLocal&) = default;
};

using LocalOp = std::variant<NopLocal, AddLocal, DelLocal, MoveLocal, RenameLocal, InsLocal, DelChLocal>;

/// Relative frequency of each kind of random operation.
struct OpWeights {
  unsigned add = 4, del = 1, mv = 2, ren = 1, nop = 0, ins = 4, delch = 2;
  friend bool operator==(const OpWeights&, const OpWeights&) = default;

  static OpWeights tree_only() { return {4, 1, 2, 1, 0, 0, 0}; }
  static OpWeights word_only() { return {0, 0, 0, 0, 0, 4, 2}; }
};

struct ScriptedOp {
  std::uint32_t site = 1;
  /// Pinned operation number; the replica counter jumps to it.
  std::optional<std::uint32_t> opnb;
  LocalOp op;
  friend bool operator==(const ScriptedOp&, const ScriptedOp&) = default;
};

/// `count` operations drawn when they run; without a site each one goes to
/// a random site.
struct RandomOps {
  std::optional<std::uint32_t> site;
  std::uint32_t count = 0;
  OpWeights weights;
  friend bool operator==(const RandomOps&, const RandomOps&) = default;
};

/// Barrier: everything before it is generated and delivered everywhere.
struct Sync {
  friend bool operator==(const Sync&, const Sync&) = default;
};

/// Explicit schedules only: move the head of channel from->to into the
/// receiver's inbox. With `id` set, the head must be that request.
struct Deliver {
  std::uint32_t from = 1;
  std::uint32_t to = 2;
  std::optional<RequestId> id;
  friend bool operator==(const Deliver&, const Deliver&) = default;
};

using ScriptEntry = std::variant<ScriptedOp, RandomOps, Sync, Deliver>;

enum class SchedulePolicy {
  kRandom,    // seeded choice among enabled local ops and deliveries
  kOpsFirst,  // within a phase, local ops before any delivery
  kExplicit,  // script order; Deliver entries drive the network
};

struct Scenario {
  std::uint64_t seed = 0;
  std::uint32_t sites = 1;
  std::vector<ScriptEntry> script;
  SchedulePolicy schedule = SchedulePolicy::kRandom;
  MoveCycle move_policy = MoveCycle::kDetachPath;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Invalid scenario: unknown site, non-generable scripted op, bad delivery.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const LocalOp& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NopLocal>) return "nop";
        else if constexpr (std::is_same_v<T, AddLocal>) return "add under " + o.parent.to_string();
        else if constexpr (std::is_same_v<T, DelLocal>) return "del " + o.node.to_string();
        else if constexpr (std::is_same_v<T, MoveLocal>) return "mv " + o.node.to_string() + " under " + o.parent.to_string();
        else if constexpr (std::is_same_v<T, RenameLocal>) return "ren " + o.node.to_string() + " to " + o.label;
        else if constexpr (std::is_same_v<T, InsLocal>)
          return "ins " + quote_char(o.ch) + " at " + std::to_string(o.pos) + " in " + o.node.to_string();
        else return "delch at " + std::to_string(o.pos) + " in " + o.node.to_string();
      },
      op);
}

// ---------------------------------------------------------------------------
// Requests and replicas

struct Request {
  RequestId id;
  ComposedOp op;
  /// Immediate causal predecessors.
  std::set<RequestId> deps;
  /// Sub-algorithm request as emitted at the origin.
  ComposedRequest sub;
};

class Replica {
 public:
  Replica(std::uint32_t site, MoveCycle policy) : site_(site), env_(policy) {}

  std::uint32_t site() const { return site_; }
  std::uint32_t counter() const { return counter_; }
  const ComposedEnvironment& env() const { return env_; }
  const LabeledTreeState& state() const { return env_.state(); }
  const std::vector<RequestId>& executed() const { return executed_order_; }
  bool has_executed(RequestId id) const { return executed_.count(id) != 0; }
  const std::set<RequestId>& frontier() const { return frontier_; }
  /// Full causal past of a request this replica has executed.
  const std::set<RequestId>& past_of(RequestId id) const { return past_.at(id); }
  std::vector<Request>& inbox() { return inbox_; }
  const std::vector<Request>& inbox() const { return inbox_; }

  bool generable(const LocalOp& op) const {
    const auto& t = state().tree;
    return std::visit(
        [&](const auto& o) -> bool {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, NopLocal>) {
            return true;
          } else if constexpr (std::is_same_v<T, AddLocal>) {
            return t.contains(o.parent);
          } else if constexpr (std::is_same_v<T, DelLocal>) {
            return o.node.is_gen() && t.contains(o.node);
          } else if constexpr (std::is_same_v<T, MoveLocal>) {
            return o.node.is_gen() && o.node != o.parent && t.contains(o.node) && t.contains(o.parent) &&
                   !in_subtree(t.root(), o.node, o.parent);
          } else if constexpr (std::is_same_v<T, RenameLocal>) {
            return o.node.is_gen() && t.contains(o.node);
          } else if constexpr (std::is_same_v<T, InsLocal>) {
            auto it = state().delta.find(o.node);
            return it != state().delta.end() && o.pos <= it->second.visible_size();
          } else {
            auto it = state().delta.find(o.node);
            return it != state().delta.end() && o.pos < it->second.visible_size();
          }
        },
        op);
  }

  /// Generates, executes and returns a request. Throws ScenarioError when
  /// the operation is not generable or `opnb` does not increase.
  Request local_step(const LocalOp& op, std::optional<std::uint32_t> opnb = std::nullopt) {
    if (!generable(op)) throw ScenarioError("site " + std::to_string(site_) + ": not generable: " + to_string(op));
    if (opnb && *opnb <= counter_)
      throw ScenarioError("site " + std::to_string(site_) + ": operation number " + std::to_string(*opnb) + " not increasing");
    counter_ = opnb ? *opnb : counter_ + 1;
    const RequestId id{site_, counter_};
    ComposedOp composed = to_composed(op, id);
    Request req{id, composed, frontier_, TreeRequest{}};
    req.sub = env_.route_local(id, composed);
    record(req);
    return req;
  }

  /// All immediate predecessors executed. The executed set is causally
  /// closed, so this covers the whole causal past.
  bool ready(const Request& req) const {
    return std::all_of(req.deps.begin(), req.deps.end(), [&](RequestId d) { return has_executed(d); });
  }

  /// Throws std::logic_error when the request is not ready.
  void external_step(const Request& req) {
    if (!ready(req)) throw std::logic_error("external_step: request " + req.id.to_string() + " not ready");
    if (const auto* t = std::get_if<TreeSide>(&req.op)) {
      env_.route_external(TreeRequest{req.id, t->op, tree_past(req)});
    } else {
      const auto& d = std::get<DataSide>(req.op);
      env_.route_external(WordRequest{req.id, d.id, d.op});
    }
    record(req);
  }

  /// Executes every ready inbox request, repeatedly, in inbox order.
  /// Returns the executed ids.
  std::vector<RequestId> drain_inbox() {
    std::vector<RequestId> done;
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i = 0; i < inbox_.size(); ++i) {
        if (!ready(inbox_[i])) continue;
        Request req = std::move(inbox_[i]);
        inbox_.erase(inbox_.begin() + static_cast<std::ptrdiff_t>(i));
        external_step(req);
        done.push_back(req.id);
        progress = true;
        break;
      }
    }
    return done;
  }

 private:
  ComposedOp to_composed(const LocalOp& op, RequestId id) const {
    return std::visit(
        [&](const auto& o) -> ComposedOp {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, NopLocal>) return TreeSide{NopOp{}};
          else if constexpr (std::is_same_v<T, AddLocal>) return TreeSide{AddOp{o.parent, Identifier::gen(id)}};
          else if constexpr (std::is_same_v<T, DelLocal>) return TreeSide{DelOp{o.node}};
          else if constexpr (std::is_same_v<T, MoveLocal>) return TreeSide{MoveOp{o.node, o.parent, site_}};
          else if constexpr (std::is_same_v<T, RenameLocal>) return TreeSide{RenameOp{o.node, Label::text(o.label), site_}};
          else if constexpr (std::is_same_v<T, InsLocal>)
            return DataSide{o.node, word_normalize(state().delta.at(o.node), InsCh{o.pos, o.ch}, id)};
          else return DataSide{o.node, word_normalize(state().delta.at(o.node), DelCh{o.pos}, id)};
        },
        op);
  }

  std::set<RequestId> tree_past(const Request& req) const {
    std::set<RequestId> out;
    for (auto p : causal_past(req))
      if (tree_requests_.count(p)) out.insert(p);
    return out;
  }

  std::set<RequestId> causal_past(const Request& req) const {
    std::set<RequestId> out;
    for (auto d : req.deps) {
      out.insert(d);
      const auto& p = past_.at(d);
      out.insert(p.begin(), p.end());
    }
    return out;
  }

  void record(const Request& req) {
    past_[req.id] = causal_past(req);
    if (std::holds_alternative<TreeSide>(req.op)) tree_requests_.insert(req.id);
    for (auto d : req.deps) frontier_.erase(d);
    frontier_.insert(req.id);
    executed_.insert(req.id);
    executed_order_.push_back(req.id);
  }

  std::uint32_t site_;
  std::uint32_t counter_ = 0;
  ComposedEnvironment env_;
  std::set<RequestId> executed_;
  std::vector<RequestId> executed_order_;
  std::set<RequestId> frontier_;
  std::map<RequestId, std::set<RequestId>> past_;
  std::set<RequestId> tree_requests_;
  std::vector<Request> inbox_;
};

/// Lossless per-ordered-pair FIFO channels.
class Network {
 public:
  void send(std::uint32_t from, std::uint32_t to, RequestId id) { channels_[{from, to}].push_back(id); }

  std::optional<RequestId> head(std::uint32_t from, std::uint32_t to) const {
    auto it = channels_.find({from, to});
    if (it == channels_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
  }

  RequestId pop(std::uint32_t from, std::uint32_t to) {
    auto& q = channels_.at({from, to});
    RequestId id = q.front();
    q.pop_front();
    return id;
  }

  /// Non-empty channels in (from, to) order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> busy() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& [key, q] : channels_)
      if (!q.empty()) out.push_back(key);
    return out;
  }

  bool empty() const { return busy().empty(); }

 private:
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::deque<RequestId>> channels_;
};

// ---------------------------------------------------------------------------
// Runs

struct TraceEvent {
  enum class Kind { kLocal, kDeliver, kExecute };
  Kind kind = Kind::kLocal;
  /// Generating site for kLocal, receiving site otherwise.
  std::uint32_t site = 0;
  std::uint32_t from = 0;
  RequestId id;
  /// Script operation behind a kLocal event.
  LocalOp source;
  /// Operation as executed at `site` (kLocal, kExecute).
  std::string executed;
};

struct RunResult {
  Scenario scenario;
  std::vector<Replica> replicas;
  std::vector<TraceEvent> trace;
  std::map<RequestId, Request> requests;
  bool quiescent = false;
  bool converged = false;
  std::vector<std::string> findings;
  std::optional<std::string> error;

  bool ok() const { return converged && findings.empty() && !error; }
};

namespace detail {

inline char random_char(std::mt19937_64& rng) { return static_cast<char>('a' + rng() % 26); }

inline std::vector<Identifier> gen_ids(const WellFormedTree& t) {
  auto ids = identifiers(t.root());
  std::erase_if(ids, [](Identifier id) { return !id.is_gen(); });
  return ids;
}

/// Draws an operation generable at `r`. Kinds without a candidate drop
/// out; with nothing left the result is Nop.
inline LocalOp random_local_op(const Replica& r, const OpWeights& w, std::mt19937_64& rng) {
  const auto& t = r.state().tree;
  const auto gens = gen_ids(t);
  std::vector<Identifier> all{Identifier::data(), Identifier::mem()};
  all.insert(all.end(), gens.begin(), gens.end());
  std::vector<std::pair<std::size_t, Identifier>> with_text;  // (visible length, node)
  for (const auto& [id, word] : r.state().delta) with_text.push_back({word.visible_size(), id});

  std::vector<std::pair<MoveLocal, int>> moves;
  for (auto n : gens)
    for (auto p : all)
      if (p != n && !in_subtree(t.root(), n, p)) moves.push_back({MoveLocal{n, p}, 0});
  std::vector<Identifier> nonempty;
  for (const auto& [len, id] : with_text)
    if (len > 0) nonempty.push_back(id);

  enum Kind { kAdd, kDel, kMv, kRen, kNop, kIns, kDelCh };
  const unsigned weights[] = {
      w.add,
      gens.empty() ? 0u : w.del,
      moves.empty() ? 0u : w.mv,
      gens.empty() ? 0u : w.ren,
      w.nop,
      with_text.empty() ? 0u : w.ins,
      nonempty.empty() ? 0u : w.delch,
  };
  unsigned total = 0;
  for (auto x : weights) total += x;
  if (total == 0) return NopLocal{};
  unsigned pick = static_cast<unsigned>(rng() % total);
  int kind = 0;
  while (pick >= weights[kind]) pick -= weights[kind++];
  static const char* kLabels[] = {"a", "b", "c"};
  switch (kind) {
    case kAdd: return AddLocal{all[rng() % all.size()]};
    case kDel: return DelLocal{gens[rng() % gens.size()]};
    case kMv: return moves[rng() % moves.size()].first;
    case kRen: {
      auto n = gens[rng() % gens.size()];
      return RenameLocal{n, kLabels[rng() % 3]};
    }
    case kIns: {
      const auto& [len, id] = with_text[rng() % with_text.size()];
      std::size_t pos = rng() % (len + 1);
      return InsLocal{id, pos, random_char(rng)};
    }
    case kDelCh: {
      auto id = nonempty[rng() % nonempty.size()];
      return DelChLocal{id, rng() % r.state().delta.at(id).visible_size()};
    }
    default: return NopLocal{};
  }
}

struct Pending {
  std::uint32_t site;
  std::optional<std::uint32_t> opnb;
  std::optional<LocalOp> fixed;  // unset: random with `weights`
  OpWeights weights;
};

class Runner {
 public:
  explicit Runner(const Scenario& sc) : rng_(sc.seed) {
    result_.scenario = sc;
    if (sc.sites == 0) throw ScenarioError("scenario needs at least one site");
    for (std::uint32_t s = 1; s <= sc.sites; ++s) result_.replicas.emplace_back(s, sc.move_policy);
  }

  RunResult run() {
    try {
      if (result_.scenario.schedule == SchedulePolicy::kExplicit)
        run_explicit();
      else
        run_phased();
      result_.quiescent = quiescent();
      if (!result_.quiescent) throw std::logic_error("run ended with undelivered requests");
    } catch (const ScenarioError& e) {
      result_.error = std::string("scenario error: ") + e.what();
    } catch (const std::exception& e) {
      result_.error = std::string("harness error: ") + e.what();
    }
    finish();
    return std::move(result_);
  }

 private:
  Replica& replica(std::uint32_t site) {
    if (site == 0 || site > result_.replicas.size())
      throw ScenarioError("unknown site " + std::to_string(site));
    return result_.replicas[site - 1];
  }

  void local(const Pending& p) {
    Replica& r = replica(p.site);
    LocalOp op = p.fixed ? *p.fixed : random_local_op(r, p.weights, rng_);
    Request req = r.local_step(op, p.opnb);
    result_.trace.push_back({TraceEvent::Kind::kLocal, p.site, 0, req.id, op, executed_text(r, req)});
    for (auto& other : result_.replicas)
      if (other.site() != p.site) network_.send(p.site, other.site(), req.id);
    result_.requests.emplace(req.id, std::move(req));
  }

  void deliver(std::uint32_t from, std::uint32_t to) {
    RequestId id = network_.pop(from, to);
    result_.trace.push_back({TraceEvent::Kind::kDeliver, to, from, id, NopLocal{}, {}});
    Replica& r = replica(to);
    r.inbox().push_back(result_.requests.at(id));
    for (auto done : r.drain_inbox())
      result_.trace.push_back(
          {TraceEvent::Kind::kExecute, to, 0, done, NopLocal{}, executed_text(r, result_.requests.at(done))});
  }

  static std::string executed_text(const Replica& r, const Request& req) {
    if (std::holds_alternative<TreeSide>(req.op)) return to_string(r.env().tree().history().back().executed);
    return to_string(req.op);
  }

  bool quiescent() const {
    if (!network_.empty()) return false;
    return std::all_of(result_.replicas.begin(), result_.replicas.end(),
                       [](const Replica& r) { return r.inbox().empty(); });
  }

  std::vector<std::vector<Pending>> phases() {
    std::vector<std::vector<Pending>> out(1);
    for (const auto& entry : result_.scenario.script) {
      if (const auto* s = std::get_if<ScriptedOp>(&entry)) {
        out.back().push_back({s->site, s->opnb, s->op, {}});
      } else if (const auto* r = std::get_if<RandomOps>(&entry)) {
        for (std::uint32_t k = 0; k < r->count; ++k) {
          std::uint32_t site = r->site ? *r->site : 1 + static_cast<std::uint32_t>(rng_() % result_.scenario.sites);
          out.back().push_back({site, std::nullopt, std::nullopt, r->weights});
        }
      } else if (std::holds_alternative<Sync>(entry)) {
        out.emplace_back();
      } else {
        throw ScenarioError("deliver entries need the explicit schedule");
      }
    }
    return out;
  }

  void run_phased() {
    const bool ops_first = result_.scenario.schedule == SchedulePolicy::kOpsFirst;
    for (auto& phase : phases()) {
      std::map<std::uint32_t, std::deque<Pending>> queues;
      for (auto& p : phase) {
        replica(p.site);
        queues[p.site].push_back(std::move(p));
      }
      while (true) {
        std::vector<std::uint32_t> sites;
        for (const auto& [site, q] : queues)
          if (!q.empty() && (!q.front().fixed || replica(site).generable(*q.front().fixed))) sites.push_back(site);
        auto channels = network_.busy();
        if (sites.empty() && channels.empty()) break;
        const bool only_ops = ops_first && !sites.empty();
        const std::size_t n = sites.size() + (only_ops ? 0 : channels.size());
        const std::size_t pick = rng_() % n;
        if (pick < sites.size()) {
          auto& q = queues[sites[pick]];
          Pending p = std::move(q.front());
          q.pop_front();
          local(p);
        } else {
          auto [from, to] = channels[pick - sites.size()];
          deliver(from, to);
        }
      }
      for (const auto& [site, q] : queues)
        if (!q.empty()) throw ScenarioError("site " + std::to_string(site) + ": never generable: " + to_string(*q.front().fixed));
    }
  }

  void drain_in_order() {
    for (auto busy = network_.busy(); !busy.empty(); busy = network_.busy())
      deliver(busy.front().first, busy.front().second);
  }

  void run_explicit() {
    for (const auto& entry : result_.scenario.script) {
      if (const auto* s = std::get_if<ScriptedOp>(&entry)) {
        local({s->site, s->opnb, s->op, {}});
      } else if (const auto* r = std::get_if<RandomOps>(&entry)) {
        for (std::uint32_t k = 0; k < r->count; ++k) {
          std::uint32_t site = r->site ? *r->site : 1 + static_cast<std::uint32_t>(rng_() % result_.scenario.sites);
          local({site, std::nullopt, std::nullopt, r->weights});
        }
      } else if (std::holds_alternative<Sync>(entry)) {
        drain_in_order();
      } else {
        const auto& d = std::get<Deliver>(entry);
        replica(d.from);
        replica(d.to);
        auto head = network_.head(d.from, d.to);
        if (!head) throw ScenarioError("deliver " + std::to_string(d.from) + "->" + std::to_string(d.to) + ": channel empty");
        if (d.id && *d.id != *head)
          throw ScenarioError("deliver " + std::to_string(d.from) + "->" + std::to_string(d.to) + ": head is " +
                              head->to_string() + ", not " + d.id->to_string());
        deliver(d.from, d.to);
      }
    }
    drain_in_order();
  }

  void finish() {
    auto& reps = result_.replicas;
    result_.converged = false;
    if (!result_.quiescent || result_.error) return;
    const std::string first = canonical_serialize(reps.front().state());
    result_.converged = true;
    for (const auto& r : reps) {
      if (canonical_serialize(r.state()) != first) {
        result_.converged = false;
        result_.findings.push_back("divergence: site " + std::to_string(r.site()) + " differs from site 1");
      }
      if (!(r.env().tree().replay_canonical() == r.state().tree))
        result_.findings.push_back("order dependence: site " + std::to_string(r.site()) +
                                   " tree differs when integrated in canonical order");
    }
  }

  std::mt19937_64 rng_;
  Network network_;
  RunResult result_;
};

}  // namespace detail

/// Runs a scenario to quiescence. Scenario problems land in `error`, never
/// in an exception.
inline RunResult run_scenario(const Scenario& sc) {
  try {
    return detail::Runner(sc).run();
  } catch (const ScenarioError& e) {
    RunResult r;
    r.scenario = sc;
    r.error = std::string("scenario error: ") + e.what();
    return r;
  }
}

/// The run as an explicit schedule with pinned operation numbers; running
/// it reproduces the same trace.
inline Scenario to_explicit(const RunResult& run) {
  Scenario sc;
  sc.seed = run.scenario.seed;
  sc.sites = run.scenario.sites;
  sc.schedule = SchedulePolicy::kExplicit;
  sc.move_policy = run.scenario.move_policy;
  for (const auto& ev : run.trace) {
    if (ev.kind == TraceEvent::Kind::kLocal)
      sc.script.push_back(ScriptedOp{ev.site, ev.id.opnb, ev.source});
    else if (ev.kind == TraceEvent::Kind::kDeliver)
      sc.script.push_back(Deliver{ev.from, ev.site, ev.id});
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Projections

template <typename R>
struct ProjectedStep {
  std::uint32_t site = 0;
  bool local = false;
  R request;
};

struct Projection {
  std::vector<ProjectedStep<TreeRequest>> tree;
  std::map<Identifier, std::vector<ProjectedStep<WordRequest>>> words;
};

/// Splits the generate/execute transitions of a run into the tree run and
/// one run per word. Deliveries carry no transition and are dropped.
inline Projection project_trace(const RunResult& run) {
  Projection out;
  for (const auto& ev : run.trace) {
    if (ev.kind == TraceEvent::Kind::kDeliver) continue;
    const bool local = ev.kind == TraceEvent::Kind::kLocal;
    const auto& sub = run.requests.at(ev.id).sub;
    if (const auto* t = std::get_if<TreeRequest>(&sub))
      out.tree.push_back({ev.site, local, *t});
    else {
      const auto& w = std::get<WordRequest>(sub);
      out.words[w.node].push_back({ev.site, local, w});
    }
  }
  return out;
}

/// Replays each projection through standalone sub-algorithm replicas and
/// compares with the states embedded in the run. Returns mismatches; an
/// illegal projection (unready request) is reported as one.
inline std::vector<std::string> check_projections(const RunResult& run) {
  std::vector<std::string> problems;
  const auto proj = project_trace(run);
  const std::uint32_t n = run.scenario.sites;
  try {
    std::vector<TreeIntegrator> trees(n, TreeIntegrator(run.scenario.move_policy));
    for (const auto& step : proj.tree) {
      auto& ti = trees.at(step.site - 1);
      if (step.local)
        ti.integrate_local(step.request.id, step.request.op);
      else
        ti.integrate(step.request.id, step.request.op, step.request.past);
    }
    for (std::uint32_t s = 0; s < n; ++s)
      if (!(trees[s].state() == run.replicas[s].state().tree))
        problems.push_back("tree projection differs at site " + std::to_string(s + 1));
  } catch (const std::exception& e) {
    problems.push_back(std::string("tree projection not replayable: ") + e.what());
  }
  for (const auto& [node, steps] : proj.words) {
    try {
      std::vector<WordState> words(n);
      for (const auto& step : steps) words.at(step.site - 1) = word_apply(words[step.site - 1], step.request.op);
      for (std::uint32_t s = 0; s < n; ++s) {
        const auto& rep = run.replicas[s];
        auto it = rep.env().words().find(node);
        WordState embedded = it == rep.env().words().end() ? WordState{} : it->second;
        if (!(words[s] == embedded))
          problems.push_back("word projection " + node.to_string() + " differs at site " + std::to_string(s + 1));
        auto live = rep.state().delta.find(node);
        if (live != rep.state().delta.end() && !(live->second == words[s]))
          problems.push_back("word of live node " + node.to_string() + " differs at site " + std::to_string(s + 1));
      }
    } catch (const std::exception& e) {
      problems.push_back("word projection " + node.to_string() + " not replayable: " + e.what());
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Fuzzing

enum class FuzzMode { kMixed, kTree, kWord, kMvCycle, kNone };

inline const char* to_string(FuzzMode m) {
  switch (m) {
    case FuzzMode::kMixed: return "mixed";
    case FuzzMode::kTree: return "tree";
    case FuzzMode::kWord: return "word";
    case FuzzMode::kMvCycle: return "mv-cycle";
    case FuzzMode::kNone: return "none";
  }
  return "?";
}

inline std::optional<FuzzMode> parse_fuzz_mode(std::string_view s) {
  for (auto m : {FuzzMode::kMixed, FuzzMode::kTree, FuzzMode::kWord, FuzzMode::kMvCycle, FuzzMode::kNone})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct FuzzConfig {
  std::uint64_t seed = 1;
  std::size_t runs = 1000;
  std::uint32_t min_sites = 3, max_sites = 5;
  std::uint32_t min_ops = 5, max_ops = 15;
  FuzzMode mode = FuzzMode::kMixed;
  MoveCycle move_policy = MoveCycle::kDetachPath;
  bool shrink = true;
  std::size_t max_failures = 5;
};

/// Scenario number `index` of a fuzz campaign.
inline Scenario make_fuzz_scenario(const FuzzConfig& cfg, std::size_t index) {
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ull + index);
  Scenario sc;
  sc.seed = rng();
  sc.move_policy = cfg.move_policy;
  sc.sites = cfg.min_sites + static_cast<std::uint32_t>(rng() % (cfg.max_sites - cfg.min_sites + 1));
  auto ops = [&] { return cfg.min_ops + static_cast<std::uint32_t>(rng() % (cfg.max_ops - cfg.min_ops + 1)); };
  switch (cfg.mode) {
    case FuzzMode::kNone:
      break;
    case FuzzMode::kMixed:
    case FuzzMode::kTree:
      for (std::uint32_t s = 1; s <= sc.sites; ++s)
        sc.script.push_back(RandomOps{s, ops(), cfg.mode == FuzzMode::kTree ? OpWeights::tree_only() : OpWeights{}});
      break;
    case FuzzMode::kWord:
      sc.script.push_back(ScriptedOp{1, std::nullopt, AddLocal{Identifier::data()}});
      sc.script.push_back(ScriptedOp{1, std::nullopt, AddLocal{Identifier::data()}});
      sc.script.push_back(Sync{});
      for (std::uint32_t s = 1; s <= sc.sites; ++s) sc.script.push_back(RandomOps{s, ops(), OpWeights::word_only()});
      break;
    case FuzzMode::kMvCycle: {
      // a=(1;1), b=(1;2) under data, then Mv(a,b) at site 1 and Mv(b,a) at
      // site 2 before either hears of the other.
      sc.schedule = SchedulePolicy::kOpsFirst;
      const Identifier a = Identifier::gen(1, 1), b = Identifier::gen(1, 2);
      sc.script.push_back(ScriptedOp{1, std::nullopt, AddLocal{Identifier::data()}});
      sc.script.push_back(ScriptedOp{1, std::nullopt, AddLocal{Identifier::data()}});
      sc.script.push_back(Sync{});
      sc.script.push_back(ScriptedOp{1, std::nullopt, MoveLocal{a, b}});
      sc.script.push_back(ScriptedOp{2, std::nullopt, MoveLocal{b, a}});
      for (std::uint32_t s = 1; s <= sc.sites; ++s)
        sc.script.push_back(RandomOps{s, ops() / 3, OpWeights::tree_only()});
      break;
    }
  }
  return sc;
}

namespace detail {

inline bool fails(const RunResult& r) { return !r.error && !r.ok(); }

}  // namespace detail

/// Greedy reduction of a failing run: drop operations (with their
/// deliveries), then single deliveries, then trailing idle sites, keeping
/// each step only while the run still fails without a scenario error.
inline Scenario shrink(const RunResult& failing) {
  Scenario best = to_explicit(failing);
  auto still_fails = [](const Scenario& sc) { return detail::fails(run_scenario(sc)); };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = best.script.size(); i-- > 0;) {
      const auto* op = std::get_if<ScriptedOp>(&best.script[i]);
      if (!op) continue;
      const RequestId id{op->site, op->opnb.value_or(0)};
      Scenario cand = best;
      cand.script.erase(cand.script.begin() + static_cast<std::ptrdiff_t>(i));
      std::erase_if(cand.script, [&](const ScriptEntry& e) {
        const auto* d = std::get_if<Deliver>(&e);
        return d && d->id == id;
      });
      if (still_fails(cand)) {
        best = std::move(cand);
        changed = true;
        if (i > best.script.size()) i = best.script.size();
      }
    }
    for (std::size_t i = best.script.size(); i-- > 0;) {
      if (!std::holds_alternative<Deliver>(best.script[i])) continue;
      Scenario cand = best;
      cand.script.erase(cand.script.begin() + static_cast<std::ptrdiff_t>(i));
      if (still_fails(cand)) {
        best = std::move(cand);
        changed = true;
      }
    }
    while (best.sites > 1) {
      const std::uint32_t last = best.sites;
      bool active = std::any_of(best.script.begin(), best.script.end(), [&](const ScriptEntry& e) {
        const auto* op = std::get_if<ScriptedOp>(&e);
        return op && op->site == last;
      });
      if (active) break;
      Scenario cand = best;
      cand.sites = last - 1;
      std::erase_if(cand.script, [&](const ScriptEntry& e) {
        const auto* d = std::get_if<Deliver>(&e);
        return d && (d->from == last || d->to == last);
      });
      if (!still_fails(cand)) break;
      best = std::move(cand);
      changed = true;
    }
  }
  return best;
}

struct FuzzFailure {
  std::size_t index = 0;
  Scenario scenario;
  Scenario shrunk;
  std::vector<std::string> findings;
  std::optional<std::string> error;
};

struct FuzzSummary {
  FuzzConfig config;
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::size_t diverged = 0;
  std::size_t errors = 0;
  std::size_t projection_mismatches = 0;
  std::vector<FuzzFailure> failures;

  bool ok() const { return diverged == 0 && errors == 0 && projection_mismatches == 0; }
};

/// Runs `cfg.runs` generated scenarios; failing ones are shrunk (up to
/// `max_failures` reported). Projections are checked on every run.
inline FuzzSummary fuzz(const FuzzConfig& cfg) {
  FuzzSummary summary;
  summary.config = cfg;
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    Scenario sc = make_fuzz_scenario(cfg, i);
    RunResult run = run_scenario(sc);
    ++summary.runs;
    std::vector<std::string> findings = run.findings;
    if (!run.error && run.quiescent) {
      auto proj = check_projections(run);
      if (!proj.empty()) ++summary.projection_mismatches;
      findings.insert(findings.end(), proj.begin(), proj.end());
    }
    if (run.error)
      ++summary.errors;
    else if (run.converged)
      ++summary.converged;
    else
      ++summary.diverged;
    if ((run.error || !findings.empty()) && summary.failures.size() < cfg.max_failures) {
      FuzzFailure f{i, sc, sc, findings, run.error};
      if (cfg.shrink && detail::fails(run)) f.shrunk = shrink(run);
      summary.failures.push_back(std::move(f));
    }
  }
  return summary;
}

}  // namespace tree_ot::sim
