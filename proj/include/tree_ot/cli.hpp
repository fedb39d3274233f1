#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tree_ot/enumerate.hpp"
#include "tree_ot/legacy_paths.hpp"
#include "tree_ot/report.hpp"

namespace tree_ot::cli {

using nlohmann::json;

enum ExitCode { kOk = 0, kFindings = 1, kUsage = 2 };

namespace detail {

inline json to_json(const SweepReport& r) {
  return {{"property", r.property}, {"trees", r.trees},           {"cases", r.cases},
          {"violations", r.violations}, {"witnesses", r.witnesses}, {"ok", r.ok()}};
}

inline std::string text(const SweepReport& r) {
  std::ostringstream os;
  os << r.property << ": " << r.cases << " cases on " << r.trees << " trees, " << r.violations << " violations\n";
  for (const auto& w : r.witnesses) os << "  " << w << "\n";
  return os.str();
}

inline json to_json(const paths::LegacyReport& r) {
  return {{"trees", r.trees},
          {"tp1Cases", r.tp1_cases},
          {"tp1Violations", r.tp1_violations},
          {"tp2Cases", r.tp2_cases},
          {"tp2Violations", r.tp2_violations},
          {"witnesses", r.witnesses},
          {"ok", r.ok()}};
}

inline json to_json(const paths::FalsifierReport& r) {
  return {{"tree", paths::to_string(r.tree)},
          {"afterAdd", paths::to_string(r.t1)},
          {"afterDel", paths::to_string(r.t2)},
          {"candidates", r.candidates},
          {"pairs", r.pairs},
          {"satisfying", r.satisfying},
          {"failuresByCase", r.failures_by_case},
          {"sampleByCase", r.sample_by_case},
          {"satisfyingPairs", r.satisfying_pairs},
          {"exhausted", r.exhausted},
          {"ok", r.ok()}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace detail

/// Entry point of the `tree_ot` tool. Returns the process exit code:
/// 0 when nothing was found, 1 on a violation or divergence, 2 on usage,
/// I/O or scenario errors.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree editing transformation checker and replica simulator"};
  app.require_subcommand(1);
  std::string format = "text", output, move_cycle = "detach";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--output,-o", output, "Write the report to this file");
  app.add_option("--move-cycle", move_cycle, "Cyclic move resolution")->check(CLI::IsMember({"detach", "drop"}));

  std::size_t tp1_ids = 4;
  auto* tp1 = app.add_subcommand("check-tp1", "Exhaustive TP1 sweep over small trees");
  tp1->add_option("--max-ids", tp1_ids, "Largest number of generated identifiers");

  std::size_t tp2_ids = 3, itstar_samples = 10000, itstar_size = 5;
  std::uint64_t itstar_seed = 42;
  auto* tp2 = app.add_subcommand("check-tp2", "Exhaustive TP2 sweep and sampled IT* permutation check");
  tp2->add_option("--max-ids", tp2_ids, "Largest number of generated identifiers");
  tp2->add_option("--itstar-samples", itstar_samples, "IT* samples (0 skips)");
  tp2->add_option("--itstar-size", itstar_size, "Largest concurrent set in IT* samples");
  tp2->add_option("--seed", itstar_seed, "IT* sampling seed");

  std::size_t tp1_edges = 4, tp2_edges = 4;
  auto* legacy = app.add_subcommand("check-legacy", "TP1/TP2 for path trees with whole-subtree deletion");
  legacy->add_option("--max-edges", tp1_edges, "Tree size bound for TP1");
  legacy->add_option("--tp2-max-edges", tp2_edges, "Tree size bound for TP2");

  std::size_t depth = 2;
  auto* falsify = app.add_subcommand("falsify-del1", "Search for a transformation of child-promoting deletion");
  falsify->add_option("--depth", depth, "Candidate term depth");

  std::string scenario_path;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");

  sim::FuzzConfig fuzz_cfg;
  std::string fuzz_mode = "mixed";
  bool no_shrink = false;
  auto* fuzz = app.add_subcommand("fuzz", "Run seeded random scenarios");
  fuzz->add_option("--runs", fuzz_cfg.runs, "Number of scenarios");
  fuzz->add_option("--seed", fuzz_cfg.seed, "Campaign seed");
  fuzz->add_option("--mode", fuzz_mode, "Operation mix")
      ->check(CLI::IsMember({"mixed", "tree", "word", "mv-cycle", "none"}));
  fuzz->add_option("--max-failures", fuzz_cfg.max_failures, "Failures kept in the report");
  fuzz->add_flag("--no-shrink", no_shrink, "Report failing scenarios unshrunk");

  std::string report_path;
  auto* replay = app.add_subcommand("replay", "Re-run the scenario of a saved report and compare");
  replay->add_option("report", report_path, "Saved run report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const bool as_json = format == "json";
  const MoveCycle policy = *parse_move_cycle(move_cycle);
  std::string body;
  int code = kOk;

  try {
    if (*tp1) {
      auto r = sweep_tp1(tp1_ids, policy);
      body = as_json ? detail::to_json(r).dump(2) + "\n" : detail::text(r);
      code = r.ok() ? kOk : kFindings;
    } else if (*tp2) {
      auto r = sweep_tp2(tp2_ids);
      std::optional<SweepReport> s;
      if (itstar_samples) s = sample_it_star(itstar_samples, itstar_size, itstar_seed);
      if (as_json) {
        json j{{"tp2", detail::to_json(r)}};
        if (s) j["itStar"] = detail::to_json(*s);
        body = j.dump(2) + "\n";
      } else {
        body = detail::text(r) + (s ? detail::text(*s) : "");
      }
      code = r.ok() && (!s || s->ok()) ? kOk : kFindings;
    } else if (*legacy) {
      auto r = paths::check_tp1_tp2_del2(tp1_edges, tp2_edges);
      if (as_json) {
        body = detail::to_json(r).dump(2) + "\n";
      } else {
        std::ostringstream os;
        os << "TP1: " << r.tp1_cases << " cases, " << r.tp1_violations << " violations\n"
           << "TP2: " << r.tp2_cases << " cases, " << r.tp2_violations << " violations\n";
        for (const auto& w : r.witnesses) os << "  " << w << "\n";
        body = os.str();
      }
      code = r.ok() ? kOk : kFindings;
    } else if (*falsify) {
      auto r = paths::falsify_del1(depth);
      if (as_json) {
        body = detail::to_json(r).dump(2) + "\n";
      } else {
        std::ostringstream os;
        os << "tree " << paths::to_string(r.tree) << ", after add " << paths::to_string(r.t1) << ", after del "
           << paths::to_string(r.t2) << "\n"
           << r.candidates << " candidates, " << r.pairs << " pairs, " << r.satisfying << " satisfy TP1"
           << (r.exhausted ? " (exhaustive)" : "") << "\n";
        for (const auto& [label, n] : r.failures_by_case) os << "  " << label << ": " << n << " failing\n";
        for (const auto& p : r.satisfying_pairs) os << "  satisfying: " << p << "\n";
        body = os.str();
      }
      code = r.ok() ? kOk : kFindings;
    } else if (*simulate) {
      auto sc = sim::parse_scenario(detail::read_file(scenario_path));
      if (sim_seed) sc.seed = *sim_seed;
      auto run = sim::run_scenario(sc);
      if (as_json) {
        body = sim::report_text(run);
      } else {
        std::ostringstream os;
        for (const auto& ev : run.trace) os << sim::to_json(ev, run).dump() << "\n";
        for (const auto& r : run.replicas) os << "site " << r.site() << ": " << canonical_serialize(r.state()) << "\n";
        os << (run.converged ? "converged" : "diverged") << "\n";
        for (const auto& f : run.findings) os << "finding: " << f << "\n";
        if (run.error) os << "error: " << *run.error << "\n";
        body = os.str();
      }
      code = run.error ? kUsage : run.ok() ? kOk : kFindings;
    } else if (*fuzz) {
      fuzz_cfg.mode = *sim::parse_fuzz_mode(fuzz_mode);
      fuzz_cfg.move_policy = policy;
      fuzz_cfg.shrink = !no_shrink;
      auto s = sim::fuzz(fuzz_cfg);
      if (as_json) {
        body = sim::to_json(s).dump(2) + "\n";
      } else {
        std::ostringstream os;
        os << s.runs << " runs: " << s.converged << " converged, " << s.diverged << " diverged, " << s.errors
           << " errors, " << s.projection_mismatches << " projection mismatches\n";
        for (const auto& f : s.failures) {
          os << "scenario " << f.index << ":\n";
          for (const auto& x : f.findings) os << "  " << x << "\n";
          if (f.error) os << "  error: " << *f.error << "\n";
        }
        body = os.str();
      }
      code = s.ok() ? kOk : kFindings;
    } else if (*replay) {
      std::string rerun;
      bool same = sim::replay_matches(detail::read_file(report_path), &rerun);
      if (as_json) body = json{{"identical", same}}.dump(2) + "\n";
      else body = same ? "report reproduced\n" : "report differs\n";
      code = same ? kOk : kFindings;
    }
  } catch (const sim::ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << e.what() << "\n";
    return kUsage;
  }

  if (output.empty()) {
    out << body;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!(f << body)) {
      err << "cannot write " << output << "\n";
      return kUsage;
    }
  }
  return code;
}

}  // namespace tree_ot::cli
