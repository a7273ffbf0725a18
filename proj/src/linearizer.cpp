#include "racewitness/linearizer.hpp"

#include <algorithm>

namespace rw {

std::vector<EventId> max_min(const ClosedPO& q, std::uint32_t max_thread) {
  const Frontier& x = q.frontier();
  const PartialOrderDS& ds = q.ds();
  const std::uint32_t k = static_cast<std::uint32_t>(x.size());
  Frontier done(k, 0);
  std::vector<EventId> out;
  out.reserve(frontier_size(x));

  auto enabled = [&](std::uint32_t c) {
    if (done[c] >= x[c]) return false;
    for (std::uint32_t d = 0; d < k; ++d) {
      if (d == c) continue;
      std::uint32_t p = ds.predecessor({c, done[c]}, d);
      if (p != kNoNode && p >= done[d]) return false;
    }
    return true;
  };
  const bool has_max = max_thread < k;
  const std::uint32_t max_len = has_max ? x[max_thread] : 0;

  for (std::size_t left = frontier_size(x); left > 0; --left) {
    std::uint32_t pick = kNoNode;
    if (has_max && enabled(max_thread)) {
      pick = max_thread;
    } else {
      for (std::uint32_t c = 0; c < k && pick == kNoNode; ++c) {
        if (c == max_thread || !enabled(c)) continue;
        if (has_max) {
          // every max-thread event not forced after this one must run first
          std::uint32_t s = ds.successor({c, done[c]}, max_thread);
          if (done[max_thread] < std::min(s, max_len)) continue;
        }
        pick = c;
      }
    }
    if (pick == kNoNode) throw PreconditionViolation("no schedulable event; order is not linearizable as required");
    out.push_back(q.trace().at(pick, done[pick]++));
  }
  return out;
}

}  // namespace rw
