#include "racewitness/m2.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include <omp.h>

namespace rw {

std::vector<EventId> witness_of(const Trace& t, const Race& r) {
  if (!r.fast) return r.witness;
  std::vector<EventId> w = restrict_to(t, r.prefix);
  w.push_back(r.e1);
  w.push_back(r.e2);
  return w;
}

namespace {

std::vector<std::uint32_t> lockset(const Trace& t, EventId e) {
  std::vector<std::uint32_t> s;
  for (EventId a = t.enclosing(e); a != kNone; a = t.held_parent(a)) s.push_back(t[a].target);
  std::sort(s.begin(), s.end());
  return s;
}

bool has_open_acquire(const Trace& t, const Frontier& x) {
  for (std::uint32_t tid = 0; tid < x.size(); ++tid)
    if (t.held_top(tid, x[tid]) != kNone) return true;
  return false;
}

}  // namespace

bool same_lock_protected(const Trace& t, EventId a, EventId b) {
  for (EventId x = t.enclosing(a); x != kNone; x = t.held_parent(x))
    for (EventId y = t.enclosing(b); y != kNone; y = t.held_parent(y))
      if (t[x].target == t[y].target) return true;
  return false;
}

std::vector<Edge> build_po_with_forkjoin(const Trace& t) {
  std::vector<Edge> out;
  for (const Event& ev : t.events())
    for (EventId c : t.cross_preds(ev.id)) out.push_back({c, ev.id});
  return out;
}

CandidateSet prune_candidates(const Trace& t, bool prune) {
  CandidateSet c;
  const std::size_t nv = t.var_count();
  const std::uint32_t k = t.thread_count();
  c.live.assign(nv, 0);
  c.access.assign(nv, {});
  for (std::uint32_t x : t.shared_vars()) c.live[x] = 1;

  std::vector<std::uint8_t> written(nv, 0), first_seen(nv, 0);
  std::vector<std::vector<std::uint32_t>> common(nv);
  for (const Event& ev : t.events()) {
    if (!is_access(ev.op) || t.is_init(ev.id) || !c.live[ev.target]) continue;
    if (ev.op == Op::Write) written[ev.target] = 1;
    if (!prune) continue;
    auto held = lockset(t, ev.id);
    auto& cm = common[ev.target];
    if (!first_seen[ev.target]) {
      cm = std::move(held);
      first_seen[ev.target] = 1;
    } else {
      std::vector<std::uint32_t> both;
      std::set_intersection(cm.begin(), cm.end(), held.begin(), held.end(), std::back_inserter(both));
      cm = std::move(both);
    }
  }
  for (std::size_t x = 0; x < nv; ++x) {
    if (!written[x]) c.live[x] = 0;
    if (prune && !common[x].empty()) c.live[x] = 0;  // one lock guards every access
    if (c.live[x]) c.access[x].assign(k, {});
  }
  for (const Event& ev : t.events()) {
    if (!is_access(ev.op) || t.is_init(ev.id) || !c.live[ev.target]) continue;
    c.access[ev.target][ev.tid].push_back(ev.id);
    c.first.push_back(ev.id);
  }
  return c;
}

RaceSet m2_scan(const Trace& t, const CandidateSet& cand, EventId e1, std::uint32_t p, const M2Options& opt) {
  RaceSet out;
  const Event& ev1 = t[e1];
  const auto& list = cand.access[ev1.target][p];
  auto it = std::upper_bound(list.begin(), list.end(), e1);
  if (it == list.end()) return out;
  const Cone c1 = rcone(t, e1, p);
  Cone c2;
  bool have_c2 = false;
  DecisionOptions dopt;
  dopt.closure = opt.closure;
  dopt.verify = false;  // checked once at the end
  for (; it != list.end(); ++it) {
    EventId e2 = *it;
    if (!conflict(t, e1, e2)) continue;
    c2 = (opt.incremental && have_c2) ? rcone_extend(t, c2, e2, ev1.tid) : rcone(t, e2, ev1.tid);
    have_c2 = true;
    // e1 has to precede every later e2 as well
    if (in_frontier(t, c2.base, e1)) break;
    ++out.pairs;
    if (opt.prune && same_lock_protected(t, e1, e2)) continue;
    Frontier x = c1.frontier;
    join_into(x, c2.frontier);
    const bool cp4 = c1.cp4_used || c2.cp4_used;
    if (in_frontier(t, x, e1) || in_frontier(t, x, e2)) {
      if (cp4) out.c.push_back({e1, e2});
      continue;
    }
    if (!c1.stuck && !c2.stuck && !has_open_acquire(t, x)) {
      Race r;
      r.e1 = e1;
      r.e2 = e2;
      r.fast = true;
      r.prefix = std::move(x);
      r.meta.stage = Stage::FastPath;
      r.meta.cp4_used = cp4;
      out.z.push_back(std::move(r));
      continue;
    }
    ++out.decisions;
    Decision d = race_decision(t, e1, e2, dopt);
    if (d.race()) {
      Race r;
      r.e1 = e1;
      r.e2 = e2;
      r.witness = std::move(d.witness);
      r.meta = std::move(d.meta);
      out.z.push_back(std::move(r));
    } else if (d.uncertain()) {
      out.c.push_back({e1, e2});
    }
  }
  return out;
}

namespace {

void absorb(RaceSet& into, RaceSet&& part) {
  for (auto& r : part.z) into.z.push_back(std::move(r));
  into.c.insert(into.c.end(), part.c.begin(), part.c.end());
  into.pairs += part.pairs;
  into.decisions += part.decisions;
}

// Candidate first events that fit in the pair budget, plus whether any were cut.
std::vector<EventId> budgeted(const Trace& t, const CandidateSet& cand, std::size_t max_pairs, bool& cut) {
  cut = false;
  if (max_pairs == 0) return cand.first;
  std::vector<EventId> out;
  std::size_t used = 0;
  for (EventId e1 : cand.first) {
    std::size_t n = 0;
    for (const auto& list : cand.access[t[e1].target])
      n += static_cast<std::size_t>(list.end() - std::upper_bound(list.begin(), list.end(), e1));
    if (used + n > max_pairs) {
      cut = true;
      break;
    }
    used += n;
    out.push_back(e1);
  }
  return out;
}

RaceSet run(const Trace& t, const M2Options& opt, bool parallel) {
  const CandidateSet cand = prune_candidates(t, opt.prune);
  RaceSet all;
  const std::vector<EventId> firsts = budgeted(t, cand, opt.max_pairs, all.truncated);
  const std::uint32_t k = t.thread_count();
  const int jobs = parallel ? (opt.jobs > 0 ? opt.jobs : omp_get_max_threads()) : 1;
  std::vector<RaceSet> parts(static_cast<std::size_t>(jobs));
  const auto n = static_cast<std::int64_t>(firsts.size());

#pragma omp parallel for schedule(dynamic, 64) num_threads(jobs) if (parallel && jobs > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    RaceSet& mine = parts[static_cast<std::size_t>(omp_get_thread_num())];
    EventId e1 = firsts[static_cast<std::size_t>(i)];
    for (std::uint32_t p = 0; p < k; ++p) {
      if (p == t[e1].tid || cand.access[t[e1].target][p].empty()) continue;
      absorb(mine, m2_scan(t, cand, e1, p, opt));
    }
  }
  for (auto& part : parts) absorb(all, std::move(part));
  std::sort(all.z.begin(), all.z.end(), [](const Race& a, const Race& b) {
    return std::pair(a.e1, a.e2) < std::pair(b.e1, b.e2);
  });
  std::sort(all.c.begin(), all.c.end());

  if (opt.verify) {
    std::atomic<bool> ok{true};
    const auto nz = static_cast<std::int64_t>(all.z.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs) if (parallel && jobs > 1)
    for (std::int64_t i = 0; i < nz; ++i) {
      const Race& r = all.z[static_cast<std::size_t>(i)];
      if (!exhibits_race(t, witness_of(t, r), r.e1, r.e2)) ok = false;
    }
    if (!ok) throw std::logic_error("a reported race failed witness replay");
  }
  return all;
}

}  // namespace

RaceSet m2(const Trace& t, const M2Options& opt) { return run(t, opt, true); }
RaceSet m2_serial(const Trace& t, const M2Options& opt) { return run(t, opt, false); }

}  // namespace rw
