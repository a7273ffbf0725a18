#include "racewitness/cone.hpp"

#include <algorithm>

namespace rw {

namespace {

Frontier base_of(const Trace& t, EventId e) {
  const Event& ev = t[e];
  Frontier f(t.thread_count(), 0);
  if (ev.pos > 0) join_into(f, t.down(t.at(ev.tid, ev.pos - 1)));
  for (EventId c : t.cross_preds(e)) join_into(f, t.down(c));
  return f;
}

void saturate(const Trace& t, Cone& c, EventId e, std::uint32_t p, bool third_threads) {
  const std::uint32_t q = t[e].tid;
  const std::uint32_t k = t.thread_count();
  std::vector<std::uint8_t> held(t.lock_count(), 0);
  for (EventId a = t.enclosing(e); a != kNone; a = t.held_parent(a)) held[t[a].target] = 1;

  for (bool grew = true; grew;) {
    grew = false;
    for (std::uint32_t r = 0; r < k; ++r) {
      if (r == q) continue;
      for (EventId a = t.held_top(r, c.frontier[r]); a != kNone; a = t.held_parent(a)) {
        const bool third = r != p && third_threads;
        const bool forced = held[t[a].target] != 0;
        if (!third && !forced) continue;
        EventId rel = t.match(a);
        if (rel == kNone) {
          if (forced) c.stuck = true;
          else c.cp4_used = true;
          continue;
        }
        if (forced) c.r3_fired = true;
        else c.cp4_used = true;
        join_into(c.frontier, t.down(rel));
        grew = true;
        break;  // open acquires of r changed; rescan it
      }
    }
  }
}

}  // namespace

Cone rcone(const Trace& t, EventId e, std::uint32_t p, bool third_threads) {
  Cone c;
  c.base = base_of(t, e);
  c.frontier = c.base;
  saturate(t, c, e, p, third_threads);
  return c;
}

Cone rcone_extend(const Trace& t, const Cone& prev, EventId e2, std::uint32_t p) {
  Cone c;
  c.base = base_of(t, e2);
  join_into(c.base, prev.base);
  c.frontier = c.base;
  saturate(t, c, e2, p, true);
  return c;
}

}  // namespace rw
