#pragma once

#include <cstdint>
#include <vector>

#include "racewitness/trace.hpp"

namespace rw {

// Large lock-heavy workloads: each lock guards its own variables, threads
// keep private scratch variables, and a few shared flags are touched
// without synchronization.
struct SynthParams {
  std::uint64_t events = 100000;
  std::uint32_t threads = 8;
  std::uint32_t locks = 16;
  std::uint32_t vars_per_lock = 4;
  std::uint32_t racy_vars = 4;
  double cs_rate = 0.6;        // chance an idle thread enters a critical section
  std::uint32_t cs_len = 6;    // accesses per critical section
  double racy_rate = 0.0005;   // unsynchronized flag access per idle step
  std::uint32_t racy_in_cs = 0;    // flag accesses placed inside critical sections
  double racy_in_cs_window = 0.01; // ... all within this leading fraction of the trace
};

std::vector<RawEvent> synthetic_events(std::uint64_t seed, const SynthParams& p);

}  // namespace rw
