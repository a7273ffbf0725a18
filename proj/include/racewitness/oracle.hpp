#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "racewitness/closure.hpp"

namespace rw {

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOracleHardCap = 20;

// Every predictable race of t, found by exploring all correct reorderings.
// Pairs are (a, b) with a <_t b, sorted.  Counts input events only.
std::vector<Edge> oracle_races(const Trace& t, std::size_t max_events = 16);

struct RandomParams {
  std::uint32_t threads = 2;
  std::uint32_t events = 10;
  std::uint32_t vars = 2;
  std::uint32_t locks = 1;
  double lock_rate = 0.25;     // chance a step acquires or releases a lock
  double write_rate = 0.5;
  bool close_locks = false;    // release everything still held at the end
  bool fork_join = false;      // thread 1 forks the others first and may join them
};

std::vector<RawEvent> random_events(std::uint64_t seed, const RandomParams& params);
Trace random_trace(std::uint64_t seed, const RandomParams& params);

}  // namespace rw
