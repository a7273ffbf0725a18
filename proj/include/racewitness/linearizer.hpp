#pragma once

#include <stdexcept>
#include <vector>

#include "racewitness/closure.hpp"

namespace rw {

class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Linearizes a closed order, running thread `max_thread` as early as possible
// and everything else as late as possible.  Requires the events outside
// `max_thread` to have every conflicting pair ordered.
std::vector<EventId> max_min(const ClosedPO& q, std::uint32_t max_thread);

}  // namespace rw
