// End-to-end acceptance checks.  Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.  Thresholds are fixed here on purpose.
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "racewitness/baselines.hpp"
#include "racewitness/m2.hpp"
#include "racewitness/oracle.hpp"
#include "racewitness/race_decision.hpp"
#include "reference.hpp"

#ifndef RW_CLI
#error "RW_CLI must name the command-line binary"
#endif

using namespace rw;
using rwtest::edge;
using rwtest::ev;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kSmallExampleSeconds = 0.1;
constexpr int kTwoThreadTraces = 2000;
constexpr double kTwoThreadSeconds = 60.0;
constexpr int kThreeThreadTraces = 2000;
constexpr int kClosureChecks = 1000;
constexpr std::size_t kDsOps = 100000;
constexpr double kDsGrowth = 2.5;
constexpr int kBaselineTraces = 1000;
constexpr std::uint64_t kScaleEvents = 1000000;
constexpr double kScaleSeconds = 300.0;
constexpr long kScaleKiB = 4L * 1024 * 1024;

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Edge> pairs_of(const RaceSet& z) {
  std::vector<Edge> out;
  for (const Race& r : z.z) out.push_back({r.e1, r.e2});
  return out;
}

bool contains(const std::vector<Edge>& v, Edge e) { return std::find(v.begin(), v.end(), e) != v.end(); }

bool all_witnesses_replay(const Trace& t, const RaceSet& z) {
  for (const Race& r : z.z)
    if (!exhibits_race(t, witness_of(t, r), r.e1, r.e2)) return false;
  return true;
}

void two_thread_example() {
  auto t0 = Clock::now();
  Trace t = rwtest::fixture("lock_handoff");
  RaceSet z = m2(t);
  const double secs = since(t0);
  bool ok = pairs_of(z) == std::vector<Edge>{edge(t, 2, 7)} && z.complete();
  ok = ok && rwtest::inputs(t, witness_of(t, z.z[0])) == std::vector<int>{4, 5, 6, 1, 2, 7};
  for (Method m : {Method::HB, Method::SHB, Method::WCP, Method::DC})
    ok = ok && !contains(baseline_races(t, m), edge(t, 2, 7));
  char buf[96];
  std::snprintf(buf, sizeof buf, "two-thread example: exact witness, missed by HB/SHB/WCP/DC, %.4fs", secs);
  report(1, ok && secs < kSmallExampleSeconds, buf);
}

void three_thread_example() {
  Trace t = rwtest::fixture("nested_locks");
  Decision d = race_decision(t, ev(t, 2), ev(t, 14));
  bool ok = d.race() && d.meta.closure_edges == std::vector<Edge>{edge(t, 8, 11)};
  ok = ok && rwtest::inputs(t, d.witness) == std::vector<int>{5, 6, 7, 8, 9, 10, 1, 11, 12, 13, 2, 14};
  ok = ok && verify_decision(t, ev(t, 2), ev(t, 14), d);
  RaceSet z = m2(t);
  ok = ok && contains(pairs_of(z), edge(t, 2, 14)) && all_witnesses_replay(t, z);
  report(2, ok, "three-thread example: race found, closure adds exactly e8<e11, witness replays");
}

void observation_lock_example() {
  Trace t = rwtest::fixture("observe_and_lock");
  RaceSet z = m2(t);
  Decision d = race_decision(t, ev(t, 10), ev(t, 19));
  const auto& log = d.meta.closure_edges;
  bool ok = contains(pairs_of(z), edge(t, 10, 19)) && all_witnesses_replay(t, z);
  ok = ok && d.race() && contains(log, edge(t, 14, 5)) && contains(log, edge(t, 15, 4));
  ok = ok && verify_decision(t, ev(t, 10), ev(t, 19), d);
  report(3, ok, "observation/lock example: race found, closure has e14<e5 and e15<e4, witness replays");
}

void incompleteness_example() {
  Trace t = rwtest::fixture("three_way_miss");
  // the first argument's thread is the one left out of branch 2's scan
  EventId a = ev(t, 16), b = ev(t, 5);
  DecisionOptions one, two;
  one.only_branch = 1;
  two.only_branch = 2;
  Decision d1 = race_decision(t, a, b, one), d2 = race_decision(t, a, b, two), both = race_decision(t, a, b);
  bool ok = !d2.race() && d2.meta.stage == Stage::OrderingCycle;
  ok = ok && d1.race() && verify_decision(t, a, b, d1);
  ok = ok && both.race() && verify_decision(t, a, b, both);
  report(4, ok, "three-process example: one branch ends in a cycle, the other finds the race");
}

RandomParams small(std::uint32_t threads, std::uint32_t events, std::uint64_t seed) {
  RandomParams p;
  p.threads = threads;
  p.events = events;
  p.vars = 2 + static_cast<std::uint32_t>(seed % 2);
  p.locks = 1 + static_cast<std::uint32_t>((seed / 2) % 2);
  p.lock_rate = 0.3;
  return p;
}

void two_thread_completeness() {
  auto t0 = Clock::now();
  int mismatches = 0;
  std::size_t races = 0;
  for (int s = 1; s <= kTwoThreadTraces; ++s) {
    Trace t = random_trace(static_cast<std::uint64_t>(s), small(2, 14, s));
    auto z = pairs_of(m2_serial(t));
    races += z.size();
    if (z != oracle_races(t, kOracleHardCap)) ++mismatches;
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "two threads: %d traces, %zu races, %d mismatches with the oracle, %.1fs",
                kTwoThreadTraces, races, mismatches, secs);
  report(5, mismatches == 0 && secs < kTwoThreadSeconds, buf);
}

void three_thread_soundness() {
  int unsound = 0, complete = 0, incomplete_mismatch = 0;
  for (int s = 1; s <= kThreeThreadTraces; ++s) {
    Trace t = random_trace(static_cast<std::uint64_t>(s), small(3, 12, s));
    RaceSet rs = m2_serial(t);
    auto truth = oracle_races(t, kOracleHardCap);
    for (const Race& r : rs.z)
      if (!exhibits_race(t, witness_of(t, r), r.e1, r.e2) ||
          !std::binary_search(truth.begin(), truth.end(), Edge{r.e1, r.e2}))
        ++unsound;
    if (rs.complete()) {
      ++complete;
      if (pairs_of(rs) != truth) ++incomplete_mismatch;
    }
  }
  report(6, unsound == 0, "three threads: " + std::to_string(kThreeThreadTraces) + " traces, " +
                              std::to_string(unsound) + " unsound reports");
  report(7, incomplete_mismatch == 0 && complete > 0,
         "certified-complete runs: " + std::to_string(complete) + " of " + std::to_string(kThreeThreadTraces) +
             ", " + std::to_string(incomplete_mismatch) + " differ from the oracle");
}

bool same_order(const Trace& t, const ClosedPO& q, const rwtest::Relation& r) {
  auto xs = restrict_to(t, q.frontier());
  for (EventId a : xs)
    for (EventId b : xs)
      if (a != b && q.leq(a, b) != r.get(a, b)) return false;
  return true;
}

bool same_order(const Trace& t, const ClosedPO& p, const ClosedPO& q) {
  auto xs = restrict_to(t, p.frontier());
  for (EventId a : xs)
    for (EventId b : xs)
      if (p.leq(a, b) != q.leq(a, b)) return false;
  return true;
}

void closure_against_saturation() {
  std::mt19937_64 rng(7);
  int checked = 0, wrong = 0, cycles = 0;
  for (std::uint64_t seed = 1; checked < kClosureChecks; ++seed) {
    Trace t = random_trace(seed, small(2 + seed % 2, 10, seed));
    auto x = rwtest::random_feasible(t, seed);
    if (!x) continue;
    ClosedPO fifo = respect_po(t, *x);
    if (fifo.infeasible()) continue;
    std::vector<Edge> extra;
    auto xs = restrict_to(t, *x);
    for (int i = 0; i < static_cast<int>(rng() % 3); ++i) {
      EventId a = xs[rng() % xs.size()], b = xs[rng() % xs.size()];
      if (add_edge(fifo, a, b)) extra.push_back({a, b});
    }
    ClosedPO lifo = fifo;
    lifo.set_options({.lifo = true});
    auto ref = rwtest::saturate_closure(t, *x, extra);
    const bool ok = close(fifo), ok_lifo = close(lifo);
    ++checked;
    if (ok != ref.has_value() || ok != ok_lifo) {
      ++wrong;
      continue;
    }
    if (!ok) {
      ++cycles;
      continue;
    }
    if (!same_order(t, fifo, *ref) || !same_order(t, fifo, lifo)) ++wrong;
  }
  report(8, wrong == 0, "closure: " + std::to_string(checked) + " random orders (" + std::to_string(cycles) +
                            " cyclic), " + std::to_string(wrong) + " disagree with saturation or FIFO/LIFO");
}

// Random acyclic workload: an edge only goes from a lower to a higher rank.
double ds_ns_per_op(std::uint32_t n, std::size_t ops, std::uint64_t seed) {
  const std::uint32_t k = 8, len = n / k;
  PartialOrderDS ds(std::vector<std::uint32_t>(k, len));
  std::mt19937_64 rng(seed);
  auto node = [&] { return Node{static_cast<std::uint32_t>(rng() % k), static_cast<std::uint32_t>(rng() % len)}; };
  std::uint64_t sink = 0;
  auto t0 = Clock::now();
  for (std::size_t i = 0; i < ops; ++i) {
    Node u = node(), v = node();
    switch (i % 4) {
      case 0:
        if (u.pos > v.pos) std::swap(u, v);
        if (u.pos == v.pos) ++v.pos %= len;
        if (u.pos < v.pos) ds.insert(u, v);
        break;
      case 1: sink += ds.query(u, v); break;
      case 2: sink += ds.successor(u, v.chain); break;
      default: sink += ds.predecessor(u, v.chain); break;
    }
  }
  const double ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count() / static_cast<double>(ops);
  return sink == 42 ? ns + 1e-9 : ns;
}

void reachability_structure() {
  std::mt19937_64 rng(19);
  std::size_t ops = 0, wrong = 0;
  while (ops < kDsOps) {
    const auto k = static_cast<std::uint32_t>(1 + rng() % 8);
    std::vector<std::uint32_t> len(k);
    for (auto& l : len) l = static_cast<std::uint32_t>(1 + rng() % 9);
    PartialOrderDS ds(len);
    rwtest::NaiveReach ref(len);
    auto node = [&] {
      auto c = static_cast<std::uint32_t>(rng() % k);
      return Node{c, static_cast<std::uint32_t>(rng() % len[c])};
    };
    for (int step = 0; step < 250; ++step, ++ops) {
      Node u = node(), v = node();
      switch (rng() % 4) {
        case 0:
          if (u == v) break;
          if (ref.query(v, u)) {
            try {
              ds.insert(u, v);
              ++wrong;
            } catch (const CycleError&) {
            }
          } else {
            ds.insert(u, v);
            ref.insert(u, v);
          }
          break;
        case 1: wrong += ds.query(u, v) != ref.query(u, v); break;
        case 2: wrong += ds.successor(u, v.chain) != ref.successor(u, v.chain); break;
        default: wrong += ds.predecessor(u, v.chain) != ref.predecessor(u, v.chain); break;
      }
    }
  }
  // best of three to keep scheduler noise out of the ratio
  double small_ns = 1e300, large_ns = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    small_ns = std::min(small_ns, ds_ns_per_op(10000, 200000, 100 + rep));
    large_ns = std::min(large_ns, ds_ns_per_op(100000, 200000, 200 + rep));
  }
  const double growth = large_ns / small_ns;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "reachability: %zu checked ops, %zu wrong; %.0f ns/op at n=1e4, %.0f ns/op at n=1e5 (x%.2f)", ops,
                wrong, small_ns, large_ns, growth);
  report(9, wrong == 0 && growth < kDsGrowth, buf);
}

bool nested(const Trace& t) {
  auto inc = [](const std::vector<Edge>& a, const std::vector<Edge>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  auto s = shb_races(t), h = hb_races(t), w = wcp_races(t), d = dc_races(t);
  return inc(s, h) && inc(h, w) && inc(w, d);
}

void baseline_containment() {
  int bad = 0;
  for (const char* name : {"lock_handoff", "nested_locks", "observe_and_lock", "three_way_miss", "race_free"}) bad += !nested(rwtest::fixture(name));
  for (int s = 1; s <= kBaselineTraces; ++s) {
    RandomParams p = small(2 + s % 3, 18, s);
    p.fork_join = s % 5 == 0;
    bad += !nested(random_trace(static_cast<std::uint64_t>(s), p));
  }
  report(10, bad == 0, "SHB within HB within WCP within DC on 5 fixtures and " + std::to_string(kBaselineTraces) +
                           " random traces, " + std::to_string(bad) + " violations");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void scale() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("racewitness-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = RW_CLI, trace = (dir / "big.trace").string();
  std::string gen = cli + " synth --events " + std::to_string(kScaleEvents) +
                    " --threads 8 --locks 16 --racy-in-cs 64 --racy-rate 0.005 --seed 42 -o " + trace;
  bool ok = std::system(gen.c_str()) == 0;
  double worst = 0;
  std::string outputs[2];
  const int jobs[2] = {1, 4};
  for (int i = 0; i < 2 && ok; ++i) {
    const fs::path out = dir / ("jobs" + std::to_string(jobs[i]) + ".json");
    std::string cmd = cli + " analyze " + trace + " --json --witness --jobs " + std::to_string(jobs[i]) + " > " +
                      out.string();
    auto t0 = Clock::now();
    int rc = std::system(cmd.c_str());
    worst = std::max(worst, since(t0));
    // 0: no races, 1: races reported; anything else is an error
    ok = ok && WIFEXITED(rc) && WEXITSTATUS(rc) <= 1;
    outputs[i] = slurp(out);
  }
  rusage ru{};
  getrusage(RUSAGE_CHILDREN, &ru);
  const long kib = ru.ru_maxrss;
  const bool same = ok && !outputs[0].empty() && outputs[0] == outputs[1];
  std::error_code ec;
  fs::remove_all(dir, ec);
  char buf[200];
  std::snprintf(buf, sizeof buf, "scale: %llu events, 8 threads, slowest analyze %.1fs, peak %ld MiB, jobs 1 vs 4 %s",
                static_cast<unsigned long long>(kScaleEvents), worst, kib / 1024, same ? "identical" : "differ");
  report(11, ok && same && worst < kScaleSeconds && kib < kScaleKiB, buf);
}

}  // namespace

int main() {
  two_thread_example();
  three_thread_example();
  observation_lock_example();
  incompleteness_example();
  two_thread_completeness();
  three_thread_soundness();
  closure_against_saturation();
  reachability_structure();
  baseline_containment();
  scale();
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
