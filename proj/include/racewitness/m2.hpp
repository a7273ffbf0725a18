#pragma once

#include <cstddef>
#include <vector>

#include "racewitness/race_decision.hpp"

namespace rw {

struct Race {
  EventId e1 = kNone, e2 = kNone;  // e1 <_t e2
  bool fast = false;
  Frontier prefix;                 // fast path: witness is t restricted to this set, then e1, e2
  std::vector<EventId> witness;    // otherwise the full witness
  DecisionMeta meta;
};

std::vector<EventId> witness_of(const Trace& t, const Race& r);

struct RaceSet {
  std::vector<Race> z;    // sorted by (e1, e2)
  std::vector<Edge> c;    // rejected pairs the algorithm cannot certify, sorted
  std::size_t pairs = 0;      // candidate pairs examined
  std::size_t decisions = 0;  // full decisions run
  bool truncated = false;     // a pair budget cut the analysis short
  bool complete() const { return c.empty() && !truncated; }
};

struct M2Options {
  int jobs = 0;                 // 0: OpenMP default
  std::size_t max_pairs = 0;    // 0: unlimited
  bool verify = true;           // replay every witness
  bool prune = true;            // drop lock-protected variables and pairs
  bool incremental = true;      // extend cones along the scanned thread
  ClosureOptions closure;
};

// Per-variable, per-thread access lists of the variables that can race.
struct CandidateSet {
  std::vector<std::uint8_t> live;                          // per variable
  std::vector<std::vector<std::vector<EventId>>> access;   // [var][thread] in trace order
  std::vector<EventId> first;                              // candidate first events, trace order
};

CandidateSet prune_candidates(const Trace& t, bool prune = true);
// Both events run while their threads hold a common lock.
bool same_lock_protected(const Trace& t, EventId a, EventId b);
// Cross-thread program-order edges: fork, join and the initial writes.
std::vector<Edge> build_po_with_forkjoin(const Trace& t);

// Races (e1, e2) with e2 a later event of thread p.
RaceSet m2_scan(const Trace& t, const CandidateSet& cand, EventId e1, std::uint32_t p, const M2Options& opt = {});
RaceSet m2(const Trace& t, const M2Options& opt = {});
RaceSet m2_serial(const Trace& t, const M2Options& opt = {});

}  // namespace rw
