#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "racewitness/baselines.hpp"
#include "racewitness/m2.hpp"
#include "racewitness/oracle.hpp"
#include "racewitness/synth.hpp"
#include "racewitness/trace_io.hpp"

using namespace rw;
using nlohmann::json;

namespace {

struct Common {
  std::string file;
  std::string format = "simple";
  bool no_init = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("file", c.file, "trace file")->required();
  sub->add_option("--format", c.format, "simple or std")->check(CLI::IsMember({"simple", "std"}));
  sub->add_flag("--no-init-writes", c.no_init, "do not synthesize initial writes");
}

Trace load(const Common& c) {
  BuildOptions opt;
  opt.init_writes = !c.no_init;
  return parse_file(c.file, c.format == "std" ? TraceFormat::Std : TraceFormat::Simple, opt);
}

json event_json(const Trace& t, EventId e) {
  const Event& ev = t[e];
  json j{{"index", ev.input}, {"thread", t.thread_name(ev.tid)}, {"op", op_name(ev.op)}, {"target", t.target_name(e)}};
  j["location"] = ev.loc >= 0 ? json(t.location(ev.loc)) : json(nullptr);
  return j;
}

std::string label(const Trace& t, EventId e) { return "e" + std::to_string(t[e].input) + " (" + format_event(t, e) + ")"; }

// Location pair used to merge reports; events without a location stand alone.
std::pair<std::string, std::string> site(const Trace& t, const Race& r) {
  auto one = [&](EventId e) {
    return t[e].loc >= 0 ? "@" + t.location(t[e].loc) : "#" + std::to_string(e);
  };
  return {one(r.e1), one(r.e2)};
}

int jobs_default() {
  if (const char* s = std::getenv("RACEWITNESS_JOBS")) {
    try {
      return std::max(0, std::stoi(s));
    } catch (...) {
    }
  }
  return 0;
}

void print_pairs(const Trace& t, const std::vector<Edge>& pairs) {
  for (auto [a, b] : pairs) std::cout << label(t, a) << "  <->  " << label(t, b) << '\n';
}

std::vector<std::uint64_t> parse_range(const std::string& s) {
  auto dots = s.find("..");
  std::uint64_t lo = std::stoull(s.substr(0, dots));
  std::uint64_t hi = dots == std::string::npos ? lo : std::stoull(s.substr(dots + 2));
  if (hi < lo) throw CLI::ValidationError("--seeds", "empty range");
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = lo; x <= hi; ++x) out.push_back(x);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive data race detection with replayable witnesses"};
  app.require_subcommand(1);

  Common ac;
  bool witness = false, as_json = false;
  int jobs = jobs_default();
  std::size_t max_pairs = 0;
  auto* analyze = app.add_subcommand("analyze", "report predictable races");
  add_common(analyze, ac);
  analyze->add_flag("--witness", witness, "print a witness schedule for each report");
  analyze->add_flag("--json", as_json, "JSON output");
  analyze->add_option("--jobs", jobs, "worker threads (default: RACEWITNESS_JOBS or all cores)");
  analyze->add_option("--max-pairs", max_pairs, "stop after this many candidate pairs (0 = no limit)");

  Common cc;
  std::vector<int> pair;
  auto* check = app.add_subcommand("check", "decide a single pair of events");
  add_common(check, cc);
  check->add_option("--pair", pair, "two event indices (1-based, input order)")->expected(2)->required();

  Common bc;
  std::string method = "hb";
  bool filter_sound = false;
  auto* baseline = app.add_subcommand("baseline", "run a vector-clock race predictor");
  add_common(baseline, bc);
  baseline->add_option("--method", method, "hb, shb, wcp or dc")->check(CLI::IsMember({"hb", "shb", "wcp", "dc"}));
  baseline->add_flag("--filter-sound", filter_sound, "keep only pairs the sound analysis reports or cannot rule out");

  Common oc;
  std::size_t oracle_cap = 16;
  auto* oracle = app.add_subcommand("oracle", "enumerate all reorderings of a tiny trace");
  add_common(oracle, oc);
  oracle->add_option("--max-events", oracle_cap, "refuse larger traces (at most 20)");

  std::string seeds = "1..100";
  RandomParams rp;
  bool fuzz_verbose = false;
  auto* fuzz = app.add_subcommand("fuzz", "compare the analysis with the oracle on random traces");
  fuzz->add_option("--seeds", seeds, "seed range A..B");
  fuzz->add_option("--threads", rp.threads);
  fuzz->add_option("--events", rp.events);
  fuzz->add_option("--vars", rp.vars);
  fuzz->add_option("--locks", rp.locks);
  fuzz->add_flag("--fork-join", rp.fork_join);
  fuzz->add_flag("--verbose", fuzz_verbose, "print every mismatching trace");

  SynthParams sp;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a large lock-heavy workload");
  synth->add_option("--events", sp.events);
  synth->add_option("--threads", sp.threads);
  synth->add_option("--locks", sp.locks);
  synth->add_option("--racy-rate", sp.racy_rate, "unsynchronized flag accesses per idle step");
  synth->add_option("--racy-in-cs", sp.racy_in_cs, "flag accesses placed inside critical sections");
  synth->add_option("--seed", synth_seed);
  synth->add_option("-o,--output", synth_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) {
      Trace t = load(ac);
      M2Options opt;
      opt.jobs = jobs;
      opt.max_pairs = max_pairs;
      RaceSet rs = m2(t, opt);
      // one report per location pair, first by event order
      std::map<std::pair<std::string, std::string>, std::size_t> seen;
      std::vector<std::size_t> reports, dup_count;
      for (std::size_t i = 0; i < rs.z.size(); ++i) {
        auto [it, fresh] = seen.emplace(site(t, rs.z[i]), reports.size());
        if (fresh) {
          reports.push_back(i);
          dup_count.push_back(1);
        } else {
          ++dup_count[it->second];
        }
      }
      if (as_json) {
        json out;
        out["races"] = json::array();
        for (std::size_t r = 0; r < reports.size(); ++r) {
          const Race& race = rs.z[reports[r]];
          json j{{"e1", event_json(t, race.e1)},
                 {"e2", event_json(t, race.e2)},
                 {"pairs", dup_count[r]},
                 {"fast_path", race.fast},
                 {"cp4_used", race.meta.cp4_used},
                 {"inserted", race.meta.inserted}};
          if (witness) {
            json w = json::array();
            for (EventId e : witness_of(t, race))
              if (!t.is_init(e)) w.push_back(t[e].input);
            j["witness"] = w;
          }
          out["races"].push_back(j);
        }
        json unc = json::array();
        for (auto [a, b] : rs.c) unc.push_back({t[a].input, t[b].input});
        out["uncertain"] = unc;
        out["z"] = rs.z.size();
        out["c"] = rs.c.size();
        out["pairs"] = rs.pairs;
        out["decisions"] = rs.decisions;
        out["truncated"] = rs.truncated;
        out["complete"] = rs.complete();
        for (const auto& w : t.warnings()) out["warnings"].push_back(w);
        std::cout << out.dump(2) << '\n';
      } else {
        for (const auto& w : t.warnings()) std::cerr << "warning: " << w << '\n';
        for (std::size_t r = 0; r < reports.size(); ++r) {
          const Race& race = rs.z[reports[r]];
          std::cout << "race: " << label(t, race.e1) << "  <->  " << label(t, race.e2);
          if (dup_count[r] > 1) std::cout << "  [" << dup_count[r] << " pairs]";
          std::cout << '\n';
          if (witness) {
            std::cout << "  witness:\n";
            std::ostringstream ws;
            emit_witness(t, witness_of(t, race), ws);
            std::istringstream in(ws.str());
            for (std::string line; std::getline(in, line);) std::cout << "    " << line << '\n';
          }
        }
        std::cout << reports.size() << " race report(s), |Z|=" << rs.z.size() << '\n';
        if (rs.truncated) std::cout << "pair budget exhausted\n";
        std::cout << "complete: " << (rs.complete() ? "true" : "false") << " (|C|=" << rs.c.size() << ")\n";
      }
      return rs.z.empty() ? 0 : 1;
    }

    if (*check) {
      Trace t = load(cc);
      EventId a = t.by_input(pair[0]), b = t.by_input(pair[1]);
      if (a == kNone || b == kNone) throw std::invalid_argument("event index out of range");
      Decision d = race_decision(t, a, b);
      std::cout << (d.race() ? "race" : "no race") << " (" << stage_name(d.meta.stage) << ")\n";
      if (d.race()) {
        std::cout << "branch: " << d.meta.branch << '\n';
        emit_witness(t, d.witness, std::cout);
      } else if (d.uncertain()) {
        std::cout << "note: rejection is not certified\n";
      }
      return d.race() ? 1 : 0;
    }

    if (*baseline) {
      Trace t = load(bc);
      Method m{};
      method_from(method, m);
      auto pairs = baseline_races(t, m);
      if (filter_sound) {
        RaceSet rs = m2(t, M2Options{.jobs = jobs_default()});
        std::vector<Edge> keep;
        for (auto pr : pairs) {
          bool in_z = std::any_of(rs.z.begin(), rs.z.end(), [&](const Race& r) { return r.e1 == pr.first && r.e2 == pr.second; });
          bool in_c = std::binary_search(rs.c.begin(), rs.c.end(), pr);
          if (in_z || in_c) keep.push_back(pr);
        }
        pairs = std::move(keep);
      }
      print_pairs(t, pairs);
      std::cout << pairs.size() << " " << method << " race(s)\n";
      return pairs.empty() ? 0 : 1;
    }

    if (*synth) {
      auto raw = synthetic_events(synth_seed, sp);
      std::ofstream file;
      if (!synth_out.empty()) file.open(synth_out);
      std::ostream& out = synth_out.empty() ? std::cout : file;
      for (const RawEvent& r : raw) {
        out << r.thread << ' ' << op_name(r.op) << ' ' << r.target;
        if (!r.location.empty()) out << " @" << r.location;
        out << '\n';
      }
      return out ? 0 : 2;
    }
    if (*oracle) {
      Trace t = load(oc);
      auto pairs = oracle_races(t, oracle_cap);
      print_pairs(t, pairs);
      std::cout << pairs.size() << " predictable race(s)\n";
      return pairs.empty() ? 0 : 1;
    }

    if (*fuzz) {
      std::size_t runs = 0, bad = 0, complete = 0;
      for (std::uint64_t s : parse_range(seeds)) {
        Trace t = random_trace(s, rp);
        RaceSet rs = m2(t);
        auto truth = oracle_races(t, kOracleHardCap);
        std::vector<Edge> z;
        for (const Race& r : rs.z) z.push_back({r.e1, r.e2});
        ++runs;
        bool sound = std::includes(truth.begin(), truth.end(), z.begin(), z.end());
        bool exact = z == truth;
        if (rs.complete()) ++complete;
        if (!sound || (rs.complete() && !exact)) {
          ++bad;
          std::cout << "seed " << s << ": " << (sound ? "missed race with empty C" : "unsound report") << '\n';
          if (fuzz_verbose) emit_trace(t, std::cout);
        }
      }
      std::cout << runs << " traces, " << complete << " certified complete, " << bad << " mismatch(es)\n";
      return bad == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
