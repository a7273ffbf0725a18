#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rw {

using EventId = std::int32_t;
inline constexpr EventId kNone = -1;

enum class Op : std::uint8_t { Read, Write, Acquire, Release, Fork, Join };

const char* op_name(Op op);
bool is_access(Op op);
bool is_lock_op(Op op);

// One line of input before interning.
struct RawEvent {
  std::string thread;
  Op op = Op::Read;
  std::string target;
  std::string location;
  int line = 0;
};

struct Event {
  EventId id = kNone;       // position in the trace, 0-based
  std::uint32_t tid = 0;    // dense thread index
  std::uint32_t pos = 0;    // ordinal within the thread, 0-based
  Op op = Op::Read;
  std::uint32_t target = 0; // variable, lock or thread index depending on op
  std::int32_t input = 0;   // 1-based index among input events, 0 if synthesized
  std::int32_t loc = -1;    // location label id
  std::int32_t line = 0;    // source line in the input, 0 if synthesized
};

class MalformedTrace : public std::runtime_error {
 public:
  MalformedTrace(int line, const std::string& reason)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct BuildOptions {
  bool init_writes = true;
};

enum class Access : std::uint8_t { Read = 0, Write = 1, Acquire = 2, Release = 3 };

// Prefix-closed sets are stored as per-thread event counts.
using Frontier = std::vector<std::uint32_t>;

class Trace {
 public:
  std::size_t size() const { return events_.size(); }
  const Event& operator[](EventId e) const { return events_[static_cast<std::size_t>(e)]; }
  const std::vector<Event>& events() const { return events_; }

  std::uint32_t thread_count() const { return static_cast<std::uint32_t>(threads_.size()); }
  const std::vector<EventId>& thread_events(std::uint32_t tid) const { return threads_[tid]; }
  EventId at(std::uint32_t tid, std::uint32_t pos) const { return threads_[tid][pos]; }
  bool has_init_thread() const { return init_thread_; }
  bool is_init(EventId e) const { return init_thread_ && events_[e].tid == 0; }

  const std::string& thread_name(std::uint32_t tid) const { return thread_names_[tid]; }
  const std::string& var_name(std::uint32_t v) const { return var_names_[v]; }
  const std::string& lock_name(std::uint32_t l) const { return lock_names_[l]; }
  const std::string& location(std::int32_t loc) const { return locations_[loc]; }
  std::string target_name(EventId e) const;
  std::size_t var_count() const { return var_names_.size(); }
  std::size_t lock_count() const { return lock_names_.size(); }
  const std::vector<std::uint32_t>& shared_vars() const { return shared_vars_; }
  const std::vector<std::uint32_t>& shared_locks() const { return shared_locks_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Observed write of a read, kNone otherwise.
  EventId obs(EventId r) const { return obs_[r]; }
  // Release of an acquire or acquire of a release; kNone if unmatched.
  EventId match(EventId e) const { return match_[e]; }
  // Cross-thread program-order predecessors (fork, join, initial writes).
  std::span<const EventId> cross_preds(EventId e) const;
  // 1-based input ordinal to event id.
  EventId by_input(int k) const;
  int input_count() const { return static_cast<int>(input_ids_.size()); }

  // Nearest same-thread event of the given kind on `target` at-or-after / at-or-before e.
  EventId after(EventId e, Access kind, std::uint32_t target) const;
  EventId before(EventId e, Access kind, std::uint32_t target) const;
  // Last read of thread p among its first `limit` events that observes w.
  EventId flow(EventId w, std::uint32_t p, std::uint32_t limit) const;
  EventId flow(EventId w, std::uint32_t p) const;
  // Next read in the same thread on the same variable observing a different write.
  EventId next_diff_read(EventId r) const { return next_diff_[r]; }

  // Per-thread counts of the least set closed under program order and
  // observation that contains e.
  std::span<const std::uint32_t> down(EventId e) const {
    return {down_.data() + static_cast<std::size_t>(e) * threads_.size(), threads_.size()};
  }
  // Innermost open acquire after the first `count` events of tid.
  EventId held_top(std::uint32_t tid, std::uint32_t count) const;
  // Acquire enclosing a given acquire in its thread.
  EventId held_parent(EventId acq) const { return held_parent_[acq]; }
  // Innermost acquire whose critical section contains e (e itself excluded).
  EventId enclosing(EventId e) const;

  friend Trace build_trace(const std::vector<RawEvent>& raw, const BuildOptions& opt);

 private:
  static std::uint64_t key(Access k, std::uint32_t tid, std::uint32_t target) {
    return (static_cast<std::uint64_t>(k) << 60) | (static_cast<std::uint64_t>(tid) << 32) | target;
  }

  std::vector<Event> events_;
  std::vector<std::vector<EventId>> threads_;
  std::vector<std::string> thread_names_, var_names_, lock_names_, locations_;
  std::vector<std::uint32_t> shared_vars_, shared_locks_;
  std::vector<std::string> warnings_;
  std::vector<EventId> obs_, match_, next_diff_, open_top_, held_parent_, input_ids_;
  std::vector<std::uint32_t> cross_off_;
  std::vector<EventId> cross_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> maps_;
  // readers of each write, sorted by (thread, position)
  std::vector<std::uint32_t> reader_off_;
  std::vector<EventId> readers_;
  std::vector<std::uint32_t> down_;
  bool init_thread_ = false;
};

Trace build_trace(const std::vector<RawEvent>& raw, const BuildOptions& opt = {});

bool conflict(const Trace& t, EventId a, EventId b);       // memory accesses only
bool lock_conflict(const Trace& t, EventId a, EventId b);  // acquire/release on one lock

// Arbitrary subset of events.
class EventSet {
 public:
  EventSet() = default;
  explicit EventSet(std::size_t n) : bits_(n, 0) {}
  static EventSet from_frontier(const Trace& t, const Frontier& f);
  static EventSet of(const Trace& t, std::initializer_list<EventId> ids);

  bool contains(EventId e) const { return e >= 0 && static_cast<std::size_t>(e) < bits_.size() && bits_[e]; }
  void insert(EventId e);
  void erase(EventId e);
  std::size_t count() const { return count_; }
  std::size_t universe() const { return bits_.size(); }
  std::vector<EventId> members() const;
  // Highest included position + 1 per thread.
  Frontier frontier(const Trace& t) const;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

bool in_frontier(const Trace& t, const Frontier& f, EventId e);
std::size_t frontier_size(const Frontier& f);
void join_into(Frontier& f, std::span<const std::uint32_t> g);

std::vector<EventId> open_acquires(const Trace& t, const EventSet& x);
std::vector<EventId> open_acquires(const Trace& t, const Frontier& f);
bool is_prefix_closed(const Trace& t, const EventSet& x);
bool is_feasible(const Trace& t, const EventSet& x);
bool is_feasible(const Trace& t, const Frontier& f);
bool is_correct_reordering(const Trace& t, std::span<const EventId> seq);
bool exhibits_race(const Trace& t, std::span<const EventId> seq, EventId e1, EventId e2);

// Events of a prefix-closed set in trace order.
std::vector<EventId> restrict_to(const Trace& t, const Frontier& f);

}  // namespace rw
