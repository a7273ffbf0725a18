#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "racewitness/dag_reach.hpp"
#include "racewitness/trace.hpp"

namespace rw {

using Edge = std::pair<EventId, EventId>;

struct ClosureOptions {
  bool lifo = false;  // worklist discipline; the result does not depend on it
};

// A partial order over a feasible prefix-closed set X, kept as chains plus
// reachability.  Once `infeasible()` is set the object is dead.
class ClosedPO {
 public:
  const Trace& trace() const { return *t_; }
  const Frontier& frontier() const { return x_; }
  const PartialOrderDS& ds() const { return ds_; }
  bool infeasible() const { return dead_; }
  void set_options(ClosureOptions opt) { opt_ = opt; }

  bool contains(EventId e) const { return in_frontier(*t_, x_, e); }
  // a <= b in the order (reflexive)
  bool leq(EventId a, EventId b) const { return ds_.query(node(a), node(b)); }
  bool unordered(EventId a, EventId b) const { return !leq(a, b) && !leq(b, a); }

  // Edges added by closure rules or explicit inserts, in insertion order.
  const std::vector<Edge>& edge_log() const { return log_; }
  // Cross-thread covering pairs: v is the first event of its thread after u
  // and u the last event of its thread before v.  Optionally skipping a thread.
  std::vector<Edge> covering_edges(std::uint32_t skip_thread = UINT32_MAX) const;

  Node node(EventId e) const { return {(*t_)[e].tid, (*t_)[e].pos}; }
  EventId event(Node n) const { return t_->at(n.chain, n.pos); }

 private:
  friend ClosedPO respect_po(const Trace&, const Frontier&, ClosureOptions);
  friend bool close(ClosedPO&);
  friend bool insert_and_close(ClosedPO&, EventId, EventId);
  friend bool add_edge(ClosedPO&, EventId, EventId);
  friend class ClosureRun;

  const Trace* t_ = nullptr;
  Frontier x_;
  PartialOrderDS ds_;
  ClosureOptions opt_;
  std::vector<Edge> log_;
  bool dead_ = false;
};

// Weakest order over X respecting t: program order (with fork/join/init
// edges), observation edges, and each thread's last release before a
// conflicting open acquire.  Marks the result infeasible if those already cycle.
ClosedPO respect_po(const Trace& t, const Frontier& x, ClosureOptions opt = {});

// Adds a -> b without closing; false (nothing changed) if it would cycle.
bool add_edge(ClosedPO& q, EventId a, EventId b);

// Saturates q under the observation and lock rules.  Returns false (and marks
// q infeasible) if a required edge would close a cycle.
bool close(ClosedPO& q);

// Adds a -> b to a closed order and re-closes.
bool insert_and_close(ClosedPO& q, EventId a, EventId b);

}  // namespace rw
