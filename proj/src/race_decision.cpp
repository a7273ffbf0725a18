#include "racewitness/race_decision.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "racewitness/linearizer.hpp"

namespace rw {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::InCone: return "in-cone";
    case Stage::InfeasibleCone: return "infeasible-cone";
    case Stage::RespectCycle: return "respect-cycle";
    case Stage::ClosureCycle: return "closure-cycle";
    case Stage::OrderingCycle: return "ordering-cycle";
    case Stage::Decided: return "decided";
    case Stage::FastPath: return "fast-path";
  }
  return "?";
}

namespace {

bool any_conflict(const Trace& t, EventId a, EventId b) { return conflict(t, a, b) || lock_conflict(t, a, b); }

// Orders every conflicting pair outside `skip` along the trace.  False on cycle.
bool order_conflicts(ClosedPO& q, std::uint32_t skip, bool& inserted) {
  const Trace& t = q.trace();
  // group candidate events by (is lock, target) so only same-object pairs are compared
  std::map<std::pair<int, std::uint32_t>, std::vector<EventId>> groups;
  const Frontier& x = q.frontier();
  for (std::uint32_t tid = 0; tid < x.size(); ++tid) {
    if (tid == skip) continue;
    for (std::uint32_t j = 0; j < x[tid]; ++j) {
      EventId e = t.at(tid, j);
      Op op = t[e].op;
      if (is_access(op)) groups[{0, t[e].target}].push_back(e);
      else if (is_lock_op(op)) groups[{1, t[e].target}].push_back(e);
    }
  }
  std::vector<Edge> pairs;
  for (auto& [key, evs] : groups) {
    std::sort(evs.begin(), evs.end());
    for (std::size_t i = 0; i < evs.size(); ++i)
      for (std::size_t j = i + 1; j < evs.size(); ++j)
        if (t[evs[i]].tid != t[evs[j]].tid && any_conflict(t, evs[i], evs[j])) pairs.push_back({evs[i], evs[j]});
  }
  // keyed on the later event first, as a streaming scan would meet them
  std::sort(pairs.begin(), pairs.end(), [](const Edge& u, const Edge& v) {
    return std::tie(u.second, u.first) < std::tie(v.second, v.first);
  });
  for (auto [a, b] : pairs) {
    if (!q.unordered(a, b)) continue;
    inserted = true;
    if (!insert_and_close(q, a, b)) return false;
  }
  return true;
}

}  // namespace

Decision race_decision(const Trace& t, EventId e1, EventId e2, const DecisionOptions& opt) {
  if (!conflict(t, e1, e2) || t[e1].tid == t[e2].tid)
    throw std::invalid_argument("race_decision needs conflicting events of different threads");
  Decision d;
  const std::uint32_t p1 = t[e1].tid, p2 = t[e2].tid;
  Cone c1 = rcone(t, e1, p2), c2 = rcone(t, e2, p1);
  d.meta.cp4_used = c1.cp4_used || c2.cp4_used;
  Frontier x = c1.frontier;
  join_into(x, c2.frontier);
  if (in_frontier(t, x, e1) || in_frontier(t, x, e2)) {
    d.meta.stage = Stage::InCone;
    return d;
  }
  if (c1.stuck || c2.stuck || !is_feasible(t, x)) {
    d.meta.stage = Stage::InfeasibleCone;
    return d;
  }
  ClosedPO q = respect_po(t, x, opt.closure);
  if (q.infeasible()) {
    d.meta.stage = Stage::RespectCycle;
    return d;
  }
  if (!close(q)) {
    d.meta.stage = Stage::ClosureCycle;
    return d;
  }
  d.meta.closure_edges = q.edge_log();
  d.meta.stage = Stage::OrderingCycle;
  const std::uint32_t branch_thread[2] = {p1, p2};
  for (int i = 0; i < 2; ++i) {
    if (opt.only_branch != 0 && opt.only_branch != i + 1) continue;
    ClosedPO b = q;
    if (!order_conflicts(b, branch_thread[i], d.meta.inserted)) continue;
    d.witness = max_min(b, branch_thread[i]);
    d.witness.push_back(std::min(e1, e2));
    d.witness.push_back(std::max(e1, e2));
    d.verdict = Verdict::Race;
    d.meta.branch = i + 1;
    d.meta.stage = Stage::Decided;
    break;
  }
  if (opt.verify && d.race() && !verify_decision(t, e1, e2, d))
    throw std::logic_error("race_decision produced a witness that does not replay");
  return d;
}

bool verify_decision(const Trace& t, EventId e1, EventId e2, const Decision& d) {
  if (!d.race()) return true;
  return exhibits_race(t, d.witness, std::min(e1, e2), std::max(e1, e2));
}

}  // namespace rw
