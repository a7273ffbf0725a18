#pragma once

#include "racewitness/trace.hpp"

namespace rw {

// Events that have to run before e can be scheduled, relative to thread p.
struct Cone {
  Frontier frontier;
  // Closure under program order and observation only; grows with e.
  Frontier base;
  // A third thread's critical section was completed to keep locks consistent.
  bool cp4_used = false;
  // A critical section of p or a third thread was completed because e's
  // thread holds the lock at e.
  bool r3_fired = false;
  // Some open acquire has no release anywhere in the trace, so the cone
  // cannot be made lock-consistent.
  bool stuck = false;
};

// `third_threads = false` leaves critical sections of threads other than p
// and e's own thread open unless e's thread holds their lock; the result is
// then a lower bound on what any schedule must run before e.
Cone rcone(const Trace& t, EventId e, std::uint32_t p, bool third_threads = true);
// Cone of e2, a later event of the thread whose cone `prev` was computed for.
Cone rcone_extend(const Trace& t, const Cone& prev, EventId e2, std::uint32_t p);

}  // namespace rw
