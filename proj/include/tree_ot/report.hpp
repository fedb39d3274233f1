#pragma once

#include <string>

#include "json.hpp"

#include "tree_ot/simulator.hpp"

namespace tree_ot::sim {

using nlohmann::json;

namespace detail {

inline Identifier id_from_json(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) throw ScenarioError(std::string("missing identifier field '") + field + "'");
  auto id = parse_identifier(j[field].get<std::string>());
  if (!id) throw ScenarioError("bad identifier '" + j[field].get<std::string>() + "'");
  return *id;
}

template <typename T>
T number_from_json(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number_unsigned())
    throw ScenarioError(std::string("missing or negative number field '") + field + "'");
  return j[field].get<T>();
}

inline const char* schedule_name(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::kRandom: return "random";
    case SchedulePolicy::kOpsFirst: return "ops-first";
    case SchedulePolicy::kExplicit: return "explicit";
  }
  return "?";
}

}  // namespace detail

inline json to_json(const LocalOp& op) {
  return std::visit(
      [](const auto& o) -> json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NopLocal>) return {{"kind", "nop"}};
        else if constexpr (std::is_same_v<T, AddLocal>) return {{"kind", "add"}, {"parent", o.parent.to_string()}};
        else if constexpr (std::is_same_v<T, DelLocal>) return {{"kind", "del"}, {"node", o.node.to_string()}};
        else if constexpr (std::is_same_v<T, MoveLocal>)
          return {{"kind", "mv"}, {"node", o.node.to_string()}, {"parent", o.parent.to_string()}};
        else if constexpr (std::is_same_v<T, RenameLocal>)
          return {{"kind", "ren"}, {"node", o.node.to_string()}, {"label", o.label}};
        else if constexpr (std::is_same_v<T, InsLocal>)
          return {{"kind", "ins"}, {"node", o.node.to_string()}, {"pos", o.pos}, {"ch", std::string(1, o.ch)}};
        else return {{"kind", "delch"}, {"node", o.node.to_string()}, {"pos", o.pos}};
      },
      op);
}

inline LocalOp local_op_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw ScenarioError("operation needs a 'kind'");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "nop") return NopLocal{};
  if (kind == "add") return AddLocal{detail::id_from_json(j, "parent")};
  if (kind == "del") return DelLocal{detail::id_from_json(j, "node")};
  if (kind == "mv") return MoveLocal{detail::id_from_json(j, "node"), detail::id_from_json(j, "parent")};
  if (kind == "ren") {
    if (!j.contains("label") || !j["label"].is_string()) throw ScenarioError("ren needs a string 'label'");
    return RenameLocal{detail::id_from_json(j, "node"), j["label"].get<std::string>()};
  }
  if (kind == "ins") {
    if (!j.contains("ch") || !j["ch"].is_string() || j["ch"].get<std::string>().size() != 1)
      throw ScenarioError("ins needs a one-character 'ch'");
    return InsLocal{detail::id_from_json(j, "node"), detail::number_from_json<std::size_t>(j, "pos"),
                    j["ch"].get<std::string>()[0]};
  }
  if (kind == "delch") return DelChLocal{detail::id_from_json(j, "node"), detail::number_from_json<std::size_t>(j, "pos")};
  throw ScenarioError("unknown operation kind '" + kind + "'");
}

inline json to_json(const OpWeights& w) {
  return {{"add", w.add}, {"del", w.del}, {"mv", w.mv}, {"ren", w.ren}, {"nop", w.nop}, {"ins", w.ins}, {"delch", w.delch}};
}

inline OpWeights weights_from_json(const json& j) {
  OpWeights w;
  if (!j.is_object()) throw ScenarioError("weights must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number_unsigned()) throw ScenarioError("weight '" + key + "' must be a natural number");
    unsigned v = value.get<unsigned>();
    if (key == "add") w.add = v;
    else if (key == "del") w.del = v;
    else if (key == "mv") w.mv = v;
    else if (key == "ren") w.ren = v;
    else if (key == "nop") w.nop = v;
    else if (key == "ins") w.ins = v;
    else if (key == "delch") w.delch = v;
    else throw ScenarioError("unknown weight '" + key + "'");
  }
  return w;
}

inline json to_json(const ScriptEntry& e) {
  if (const auto* s = std::get_if<ScriptedOp>(&e)) {
    json j{{"site", s->site}, {"op", to_json(s->op)}};
    if (s->opnb) j["opnb"] = *s->opnb;
    return j;
  }
  if (const auto* r = std::get_if<RandomOps>(&e)) {
    json body{{"count", r->count}, {"weights", to_json(r->weights)}};
    if (r->site) body["site"] = *r->site;
    return {{"random", body}};
  }
  if (std::holds_alternative<Sync>(e)) return {{"sync", true}};
  const auto& d = std::get<Deliver>(e);
  json body{{"from", d.from}, {"to", d.to}};
  if (d.id) body["id"] = d.id->to_string();
  return {{"deliver", body}};
}

inline ScriptEntry script_entry_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("script entries must be objects");
  if (j.contains("op")) {
    ScriptedOp s;
    s.site = detail::number_from_json<std::uint32_t>(j, "site");
    if (j.contains("opnb")) s.opnb = detail::number_from_json<std::uint32_t>(j, "opnb");
    s.op = local_op_from_json(j["op"]);
    return s;
  }
  if (j.contains("random")) {
    const auto& b = j["random"];
    RandomOps r;
    r.count = detail::number_from_json<std::uint32_t>(b, "count");
    if (b.contains("site")) r.site = detail::number_from_json<std::uint32_t>(b, "site");
    if (b.contains("weights")) r.weights = weights_from_json(b["weights"]);
    return r;
  }
  if (j.contains("sync")) return Sync{};
  if (j.contains("deliver")) {
    const auto& b = j["deliver"];
    Deliver d;
    d.from = detail::number_from_json<std::uint32_t>(b, "from");
    d.to = detail::number_from_json<std::uint32_t>(b, "to");
    if (b.contains("id")) {
      auto id = b["id"].is_string() ? parse_stamp(b["id"].get<std::string>()) : std::nullopt;
      if (!id) throw ScenarioError("deliver 'id' must look like \"site;opnb\"");
      d.id = *id;
    }
    return d;
  }
  throw ScenarioError("script entry needs one of op, random, sync, deliver");
}

inline json to_json(const Scenario& sc) {
  json script = json::array();
  for (const auto& e : sc.script) script.push_back(to_json(e));
  return {{"seed", sc.seed},
          {"sites", sc.sites},
          {"schedulePolicy", detail::schedule_name(sc.schedule)},
          {"movePolicy", to_string(sc.move_policy)},
          {"script", script}};
}

/// Throws ScenarioError on malformed input.
inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario sc;
  sc.seed = j.contains("seed") ? detail::number_from_json<std::uint64_t>(j, "seed") : 0;
  sc.sites = detail::number_from_json<std::uint32_t>(j, "sites");
  if (j.contains("schedulePolicy")) {
    const auto p = j["schedulePolicy"].is_string() ? j["schedulePolicy"].get<std::string>() : "";
    if (p == "random") sc.schedule = SchedulePolicy::kRandom;
    else if (p == "ops-first") sc.schedule = SchedulePolicy::kOpsFirst;
    else if (p == "explicit") sc.schedule = SchedulePolicy::kExplicit;
    else throw ScenarioError("schedulePolicy must be random, ops-first or explicit");
  }
  if (j.contains("movePolicy")) {
    auto p = j["movePolicy"].is_string() ? parse_move_cycle(j["movePolicy"].get<std::string>()) : std::nullopt;
    if (!p) throw ScenarioError("movePolicy must be detach or drop");
    sc.move_policy = *p;
  }
  if (j.contains("script")) {
    if (!j["script"].is_array()) throw ScenarioError("script must be an array");
    for (const auto& e : j["script"]) sc.script.push_back(script_entry_from_json(e));
  }
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ScenarioError("scenario is not valid JSON");
  return scenario_from_json(j);
}

inline json to_json(const TraceEvent& ev, const RunResult& run) {
  switch (ev.kind) {
    case TraceEvent::Kind::kLocal: {
      json deps = json::array();
      for (auto d : run.requests.at(ev.id).deps) deps.push_back(d.to_string());
      return {{"event", "local"}, {"site", ev.site}, {"id", ev.id.to_string()}, {"op", ev.executed}, {"deps", deps}};
    }
    case TraceEvent::Kind::kDeliver:
      return {{"event", "deliver"}, {"from", ev.from}, {"to", ev.site}, {"id", ev.id.to_string()}};
    case TraceEvent::Kind::kExecute:
      return {{"event", "execute"}, {"site", ev.site}, {"id", ev.id.to_string()}, {"op", ev.executed}};
  }
  return {};
}

inline json to_json(const RunResult& run) {
  json replicas = json::array();
  for (const auto& r : run.replicas) {
    json words = json::object();
    for (const auto& [id, w] : r.state().delta) words[id.to_string()] = w.visible_word();
    replicas.push_back({{"site", r.site()},
                        {"executed", r.executed().size()},
                        {"state", canonical_serialize(r.state())},
                        {"words", words}});
  }
  json trace = json::array();
  for (const auto& ev : run.trace) trace.push_back(to_json(ev, run));
  return {{"scenario", to_json(run.scenario)},
          {"quiescent", run.quiescent},
          {"converged", run.converged},
          {"findings", run.findings},
          {"error", run.error ? json(*run.error) : json(nullptr)},
          {"replicas", replicas},
          {"trace", trace}};
}

/// Byte-exact report text, as written to files.
inline std::string report_text(const RunResult& run) { return to_json(run).dump(2) + "\n"; }

/// Re-runs the scenario embedded in a saved report. True when the new
/// report is byte-identical to `saved`.
inline bool replay_matches(const std::string& saved, std::string* rerun = nullptr) {
  json j = json::parse(saved, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("scenario")) throw ScenarioError("not a run report");
  std::string text = report_text(run_scenario(scenario_from_json(j["scenario"])));
  bool same = text == saved;
  if (rerun) *rerun = std::move(text);
  return same;
}

inline json to_json(const FuzzSummary& s) {
  json failures = json::array();
  for (const auto& f : s.failures) {
    json entry{{"index", f.index}, {"scenario", to_json(f.scenario)}, {"findings", f.findings}};
    entry["error"] = f.error ? json(*f.error) : json(nullptr);
    if (!(f.shrunk == f.scenario)) {
      entry["shrunk"] = to_json(f.shrunk);
      entry["shrunkReport"] = to_json(run_scenario(f.shrunk));
    }
    failures.push_back(entry);
  }
  return {{"seed", s.config.seed},
          {"mode", to_string(s.config.mode)},
          {"movePolicy", to_string(s.config.move_policy)},
          {"runs", s.runs},
          {"converged", s.converged},
          {"diverged", s.diverged},
          {"errors", s.errors},
          {"projectionMismatches", s.projection_mismatches},
          {"failures", failures}};
}

}  // namespace tree_ot::sim
