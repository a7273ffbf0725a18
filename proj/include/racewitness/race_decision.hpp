#pragma once

#include <string>
#include <vector>

#include "racewitness/closure.hpp"
#include "racewitness/cone.hpp"

namespace rw {

enum class Verdict { Race, NoRace };

// Where a pair was settled.
enum class Stage {
  InCone,          // one racy event is required before the other
  InfeasibleCone,  // the cones cannot coexist
  RespectCycle,    // ordering constraints of the cones cycle
  ClosureCycle,    // closing them cycles
  OrderingCycle,   // every branch failed while ordering conflicts
  Decided,         // race found by the full procedure
  FastPath,        // race found without any closure work
};

const char* stage_name(Stage s);

struct DecisionMeta {
  bool cp4_used = false;
  bool inserted = false;  // some conflicting pair was ordered arbitrarily
  int branch = 0;         // 1 or 2 for the branch that produced the witness
  Stage stage = Stage::InCone;
  std::vector<Edge> closure_edges;  // edges added while closing, before branching
};

struct Decision {
  Verdict verdict = Verdict::NoRace;
  std::vector<EventId> witness;  // ends with the racy pair in trace order
  DecisionMeta meta;
  bool race() const { return verdict == Verdict::Race; }
  // A rejection the algorithm cannot certify.
  bool uncertain() const { return !race() && (meta.cp4_used || meta.inserted); }
};

struct DecisionOptions {
  ClosureOptions closure;
  bool verify = true;  // replay the witness; a failure throws std::logic_error
  int only_branch = 0; // 1 or 2 to try a single branch, 0 for both
};

// Branch i keeps the thread of the i-th argument as the one scheduled eagerly
// and orders every conflict among the remaining threads.
Decision race_decision(const Trace& t, EventId e1, EventId e2, const DecisionOptions& opt = {});
bool verify_decision(const Trace& t, EventId e1, EventId e2, const Decision& d);

}  // namespace rw
