#include "racewitness/trace.hpp"

#include <algorithm>
#include <unordered_set>

namespace rw {

const char* op_name(Op op) {
  switch (op) {
    case Op::Read: return "r";
    case Op::Write: return "w";
    case Op::Acquire: return "acq";
    case Op::Release: return "rel";
    case Op::Fork: return "fork";
    case Op::Join: return "join";
  }
  return "?";
}

bool is_access(Op op) { return op == Op::Read || op == Op::Write; }
bool is_lock_op(Op op) { return op == Op::Acquire || op == Op::Release; }

namespace {

struct Interner {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string>* names;
  std::uint32_t get(const std::string& s) {
    auto [it, fresh] = ids.try_emplace(s, static_cast<std::uint32_t>(names->size()));
    if (fresh) names->push_back(s);
    return it->second;
  }
};

}  // namespace

std::string Trace::target_name(EventId e) const {
  const Event& ev = events_[e];
  switch (ev.op) {
    case Op::Read:
    case Op::Write: return var_names_[ev.target];
    case Op::Acquire:
    case Op::Release: return lock_names_[ev.target];
    default: return thread_names_[ev.target];
  }
}

std::span<const EventId> Trace::cross_preds(EventId e) const {
  return {cross_.data() + cross_off_[e], cross_off_[e + 1] - cross_off_[e]};
}

EventId Trace::by_input(int k) const {
  if (k < 1 || k > static_cast<int>(input_ids_.size())) return kNone;
  return input_ids_[k - 1];
}

EventId Trace::after(EventId e, Access kind, std::uint32_t target) const {
  const Event& ev = events_[e];
  auto it = maps_.find(key(kind, ev.tid, target));
  if (it == maps_.end()) return kNone;
  const auto& v = it->second;
  auto p = std::lower_bound(v.begin(), v.end(), ev.pos);
  return p == v.end() ? kNone : threads_[ev.tid][*p];
}

EventId Trace::before(EventId e, Access kind, std::uint32_t target) const {
  const Event& ev = events_[e];
  auto it = maps_.find(key(kind, ev.tid, target));
  if (it == maps_.end()) return kNone;
  const auto& v = it->second;
  auto p = std::upper_bound(v.begin(), v.end(), ev.pos);
  return p == v.begin() ? kNone : threads_[ev.tid][*(p - 1)];
}

EventId Trace::flow(EventId w, std::uint32_t p, std::uint32_t limit) const {
  auto first = readers_.begin() + reader_off_[w];
  auto last = readers_.begin() + reader_off_[w + 1];
  auto lo = std::partition_point(first, last, [&](EventId r) { return events_[r].tid < p; });
  auto hi = std::partition_point(lo, last, [&](EventId r) {
    return events_[r].tid == p && events_[r].pos < limit;
  });
  return hi == lo ? kNone : *(hi - 1);
}

EventId Trace::flow(EventId w, std::uint32_t p) const {
  return flow(w, p, static_cast<std::uint32_t>(threads_[p].size()));
}

EventId Trace::held_top(std::uint32_t tid, std::uint32_t count) const {
  if (count == 0) return kNone;
  return open_top_[threads_[tid][count - 1]];
}

EventId Trace::enclosing(EventId e) const {
  const Event& ev = events_[e];
  if (ev.op == Op::Acquire) return held_parent_[e];
  if (ev.op == Op::Release) return held_parent_[match_[e]];
  return held_top(ev.tid, ev.pos);
}

Trace build_trace(const std::vector<RawEvent>& raw, const BuildOptions& opt) {
  if (raw.empty()) throw MalformedTrace(0, "empty trace");
  Trace t;
  Interner threads{{}, &t.thread_names_}, vars{{}, &t.var_names_}, locks{{}, &t.lock_names_},
      locs{{}, &t.locations_};

  if (opt.init_writes) {
    threads.get("init");
    t.init_thread_ = true;
  }
  for (const RawEvent& r : raw) {
    if (opt.init_writes && r.thread == "init") throw MalformedTrace(r.line, "thread name 'init' is reserved");
    threads.get(r.thread);
    if (r.op == Op::Fork || r.op == Op::Join) {
      if (r.target == r.thread) throw MalformedTrace(r.line, "thread cannot fork or join itself");
      threads.get(r.target);
    }
  }
  std::vector<std::uint8_t> written;
  for (const RawEvent& r : raw) {
    if (is_access(r.op)) {
      std::uint32_t v = vars.get(r.target);
      written.resize(t.var_names_.size(), 0);
      if (r.op == Op::Write) written[v] = 1;
      else if (!opt.init_writes && !written[v])
        throw MalformedTrace(r.line, "read of never-written variable '" + r.target + "'");
    } else if (is_lock_op(r.op)) {
      locks.get(r.target);
    }
  }

  const auto k = static_cast<std::uint32_t>(t.thread_names_.size());
  t.threads_.assign(k, {});
  std::size_t n = raw.size() + (opt.init_writes ? t.var_names_.size() : 0);
  t.events_.reserve(n);
  std::vector<int> lines;
  lines.reserve(n);

  auto push = [&](std::uint32_t tid, Op op, std::uint32_t target, std::int32_t input, std::int32_t loc, int line) {
    Event e;
    e.id = static_cast<EventId>(t.events_.size());
    e.tid = tid;
    e.pos = static_cast<std::uint32_t>(t.threads_[tid].size());
    e.op = op;
    e.target = target;
    e.input = input;
    e.loc = loc;
    e.line = line;
    t.threads_[tid].push_back(e.id);
    t.events_.push_back(e);
    lines.push_back(line);
  };
  if (opt.init_writes)
    for (std::uint32_t v = 0; v < t.var_names_.size(); ++v) push(0, Op::Write, v, 0, -1, 0);
  const EventId last_init = opt.init_writes && !t.var_names_.empty()
                                ? static_cast<EventId>(t.var_names_.size()) - 1
                                : kNone;

  int ordinal = 0;
  for (const RawEvent& r : raw) {
    std::uint32_t tid = threads.ids.at(r.thread);
    std::uint32_t target = 0;
    if (is_access(r.op)) target = vars.ids.at(r.target);
    else if (is_lock_op(r.op)) target = locks.ids.at(r.target);
    else target = threads.ids.at(r.target);
    std::int32_t loc = r.location.empty() ? -1 : static_cast<std::int32_t>(locs.get(r.location));
    push(tid, r.op, target, ++ordinal, loc, r.line);
    t.input_ids_.push_back(static_cast<EventId>(t.events_.size()) - 1);
  }

  t.obs_.assign(n, kNone);
  t.match_.assign(n, kNone);
  t.open_top_.assign(n, kNone);
  t.held_parent_.assign(n, kNone);
  std::vector<std::vector<EventId>> cross(n);

  std::vector<EventId> last_write(t.var_names_.size(), kNone);
  std::vector<std::int64_t> holder(t.lock_names_.size(), -1);
  std::vector<EventId> holder_acq(t.lock_names_.size(), kNone);
  std::vector<EventId> top(k, kNone);
  std::vector<EventId> forked(k, kNone);
  std::vector<std::uint8_t> joined(k, 0);
  std::vector<std::uint32_t> seen(k, 0);

  for (std::size_t i = 0; i < n; ++i) {
    Event& e = t.events_[i];
    EventId id = e.id;
    int line = lines[i];
    if (joined[e.tid]) throw MalformedTrace(line, "event of " + t.thread_names_[e.tid] + " after it was joined");
    if (seen[e.tid] == 0) {
      if (last_init != kNone && e.tid != 0) cross[id].push_back(last_init);
      if (forked[e.tid] != kNone) cross[id].push_back(forked[e.tid]);
    }
    ++seen[e.tid];
    switch (e.op) {
      case Op::Write: last_write[e.target] = id; break;
      case Op::Read:
        t.obs_[id] = last_write[e.target];
        if (t.obs_[id] == kNone)
          throw MalformedTrace(line, "read of never-written variable '" + t.var_names_[e.target] + "'");
        break;
      case Op::Acquire:
        if (holder[e.target] == e.tid)
          throw MalformedTrace(line, "re-entrant acquire of " + t.lock_names_[e.target]);
        if (holder[e.target] >= 0)
          throw MalformedTrace(line, "acquire of " + t.lock_names_[e.target] + " held by " +
                                         t.thread_names_[holder[e.target]]);
        holder[e.target] = e.tid;
        holder_acq[e.target] = id;
        t.held_parent_[id] = top[e.tid];
        top[e.tid] = id;
        break;
      case Op::Release: {
        if (holder[e.target] < 0)
          throw MalformedTrace(line, "release of " + t.lock_names_[e.target] + " without matching acquire");
        if (holder[e.target] != e.tid)
          throw MalformedTrace(line, "release of " + t.lock_names_[e.target] + " held by another thread");
        EventId acq = holder_acq[e.target];
        if (top[e.tid] != acq)
          throw MalformedTrace(line, "critical sections are not well nested at release of " +
                                         t.lock_names_[e.target]);
        t.match_[acq] = id;
        t.match_[id] = acq;
        holder[e.target] = -1;
        holder_acq[e.target] = kNone;
        top[e.tid] = t.held_parent_[acq];
        break;
      }
      case Op::Fork:
        if (seen[e.target] > 0)
          throw MalformedTrace(line, "forked thread " + t.thread_names_[e.target] + " already has events");
        if (forked[e.target] != kNone)
          t.warnings_.push_back("line " + std::to_string(line) + ": repeated fork of " +
                                t.thread_names_[e.target] + " ignored");
        else
          forked[e.target] = id;
        break;
      case Op::Join:
        if (seen[e.target] == 0) {
          t.warnings_.push_back("line " + std::to_string(line) + ": join of never-started thread " +
                                t.thread_names_[e.target] + " ignored");
        } else {
          cross[id].push_back(t.threads_[e.target][seen[e.target] - 1]);
          joined[e.target] = 1;
        }
        break;
    }
    t.open_top_[id] = top[e.tid];
  }

  t.cross_off_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) t.cross_off_[i + 1] = t.cross_off_[i] + static_cast<std::uint32_t>(cross[i].size());
  t.cross_.reserve(t.cross_off_[n]);
  for (auto& c : cross) t.cross_.insert(t.cross_.end(), c.begin(), c.end());

  // event maps
  for (const Event& e : t.events_) {
    Access kind;
    switch (e.op) {
      case Op::Read: kind = Access::Read; break;
      case Op::Write: kind = Access::Write; break;
      case Op::Acquire: kind = Access::Acquire; break;
      case Op::Release: kind = Access::Release; break;
      default: continue;
    }
    t.maps_[Trace::key(kind, e.tid, e.target)].push_back(e.pos);
  }

  // next read with a different observation
  t.next_diff_.assign(n, kNone);
  for (std::uint32_t tid = 0; tid < k; ++tid)
    for (std::uint32_t v = 0; v < t.var_names_.size(); ++v) {
      auto it = t.maps_.find(Trace::key(Access::Read, tid, v));
      if (it == t.maps_.end()) continue;
      const auto& ps = it->second;
      EventId next = kNone;
      for (auto p = ps.rbegin(); p != ps.rend(); ++p) {
        EventId r = t.threads_[tid][*p];
        if (next != kNone) t.next_diff_[r] = t.obs_[next] != t.obs_[r] ? next : t.next_diff_[next];
        next = r;
      }
    }

  // readers of each write, grouped by thread
  t.reader_off_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (t.obs_[i] != kNone) ++t.reader_off_[t.obs_[i] + 1];
  for (std::size_t i = 0; i < n; ++i) t.reader_off_[i + 1] += t.reader_off_[i];
  t.readers_.assign(t.reader_off_[n], kNone);
  {
    std::vector<std::uint32_t> fill(t.reader_off_.begin(), t.reader_off_.end() - 1);
    for (std::uint32_t tid = 0; tid < k; ++tid)
      for (EventId r : t.threads_[tid])
        if (t.obs_[r] != kNone) t.readers_[fill[t.obs_[r]]++] = r;
  }

  // causal frontiers under program order and observation
  t.down_.assign(n * k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = t.events_[i];
    std::uint32_t* d = t.down_.data() + i * k;
    auto join = [&](EventId src) {
      const std::uint32_t* s = t.down_.data() + static_cast<std::size_t>(src) * k;
      for (std::uint32_t j = 0; j < k; ++j) d[j] = std::max(d[j], s[j]);
    };
    if (e.pos > 0) join(t.threads_[e.tid][e.pos - 1]);
    if (t.obs_[i] != kNone) join(t.obs_[i]);
    for (EventId c : t.cross_preds(e.id)) join(c);
    d[e.tid] = e.pos + 1;
  }

  // variables and locks touched by at least two non-init threads
  auto shared = [&](std::size_t count, bool access) {
    std::vector<std::int64_t> first(count, -1);
    std::vector<std::uint8_t> multi(count, 0);
    for (const Event& e : t.events_) {
      if (access ? !is_access(e.op) : !is_lock_op(e.op)) continue;
      if (t.is_init(e.id)) continue;
      if (first[e.target] < 0) first[e.target] = e.tid;
      else if (first[e.target] != e.tid) multi[e.target] = 1;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < count; ++i)
      if (multi[i]) out.push_back(i);
    return out;
  };
  t.shared_vars_ = shared(t.var_names_.size(), true);
  t.shared_locks_ = shared(t.lock_names_.size(), false);
  return t;
}

bool conflict(const Trace& t, EventId a, EventId b) {
  if (a == b) return false;
  const Event& x = t[a];
  const Event& y = t[b];
  return is_access(x.op) && is_access(y.op) && x.target == y.target &&
         (x.op == Op::Write || y.op == Op::Write);
}

bool lock_conflict(const Trace& t, EventId a, EventId b) {
  if (a == b) return false;
  const Event& x = t[a];
  const Event& y = t[b];
  return is_lock_op(x.op) && is_lock_op(y.op) && x.target == y.target;
}

EventSet EventSet::from_frontier(const Trace& t, const Frontier& f) {
  EventSet s(t.size());
  for (std::uint32_t tid = 0; tid < f.size(); ++tid)
    for (std::uint32_t p = 0; p < f[tid]; ++p) s.insert(t.at(tid, p));
  return s;
}

EventSet EventSet::of(const Trace& t, std::initializer_list<EventId> ids) {
  EventSet s(t.size());
  for (EventId e : ids) s.insert(e);
  return s;
}

void EventSet::insert(EventId e) {
  if (!bits_[e]) {
    bits_[e] = 1;
    ++count_;
  }
}

void EventSet::erase(EventId e) {
  if (bits_[e]) {
    bits_[e] = 0;
    --count_;
  }
}

std::vector<EventId> EventSet::members() const {
  std::vector<EventId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(static_cast<EventId>(i));
  return out;
}

Frontier EventSet::frontier(const Trace& t) const {
  Frontier f(t.thread_count(), 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) {
      const Event& e = t[static_cast<EventId>(i)];
      f[e.tid] = std::max(f[e.tid], e.pos + 1);
    }
  return f;
}

bool in_frontier(const Trace& t, const Frontier& f, EventId e) {
  const Event& ev = t[e];
  return ev.pos < f[ev.tid];
}

std::size_t frontier_size(const Frontier& f) {
  std::size_t s = 0;
  for (auto c : f) s += c;
  return s;
}

void join_into(Frontier& f, std::span<const std::uint32_t> g) {
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::max(f[i], g[i]);
}

std::vector<EventId> open_acquires(const Trace& t, const EventSet& x) {
  std::vector<EventId> out;
  for (EventId e : x.members())
    if (t[e].op == Op::Acquire && !x.contains(t.match(e))) out.push_back(e);
  return out;
}

std::vector<EventId> open_acquires(const Trace& t, const Frontier& f) {
  std::vector<EventId> out;
  for (std::uint32_t tid = 0; tid < f.size(); ++tid)
    for (EventId a = t.held_top(tid, f[tid]); a != kNone; a = t.held_parent(a)) out.push_back(a);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_prefix_closed(const Trace& t, const EventSet& x) {
  for (EventId e : x.members()) {
    const Event& ev = t[e];
    if (ev.pos > 0 && !x.contains(t.at(ev.tid, ev.pos - 1))) return false;
    for (EventId c : t.cross_preds(e))
      if (!x.contains(c)) return false;
  }
  return true;
}

bool is_feasible(const Trace& t, const EventSet& x) {
  if (!is_prefix_closed(t, x)) return false;
  std::vector<std::uint8_t> lock_open(t.lock_count(), 0);
  for (EventId e : x.members()) {
    const Event& ev = t[e];
    if (ev.op == Op::Read && !x.contains(t.obs(e))) return false;
    if (ev.op == Op::Release && !x.contains(t.match(e))) return false;
    if (ev.op == Op::Acquire && !x.contains(t.match(e))) {
      if (lock_open[ev.target]) return false;
      lock_open[ev.target] = 1;
    }
  }
  return true;
}

bool is_feasible(const Trace& t, const Frontier& f) {
  for (std::uint32_t tid = 0; tid < f.size(); ++tid)
    if (f[tid] > 0) {
      auto d = t.down(t.at(tid, f[tid] - 1));
      for (std::uint32_t j = 0; j < f.size(); ++j)
        if (d[j] > f[j]) return false;
    }
  std::vector<std::uint8_t> lock_open(t.lock_count(), 0);
  for (EventId a : open_acquires(t, f)) {
    if (lock_open[t[a].target]) return false;
    lock_open[t[a].target] = 1;
  }
  return true;
}

namespace {

// Replays seq and reports whether it is a valid prefix reordering of t.
// `next` receives the per-thread counts reached.
bool replay(const Trace& t, std::span<const EventId> seq, std::vector<std::uint32_t>& next, bool check_obs) {
  next.assign(t.thread_count(), 0);
  std::vector<std::int64_t> holder(t.lock_count(), -1);
  std::vector<EventId> last_write(t.var_count(), kNone);
  std::vector<std::uint8_t> done(t.size(), 0);
  for (EventId e : seq) {
    if (e < 0 || static_cast<std::size_t>(e) >= t.size() || done[e]) return false;
    const Event& ev = t[e];
    if (ev.pos != next[ev.tid]) return false;
    for (EventId c : t.cross_preds(e))
      if (!done[c]) return false;
    switch (ev.op) {
      case Op::Acquire:
        if (holder[ev.target] >= 0) return false;
        holder[ev.target] = ev.tid;
        break;
      case Op::Release:
        if (holder[ev.target] != ev.tid) return false;
        holder[ev.target] = -1;
        break;
      case Op::Write: last_write[ev.target] = e; break;
      case Op::Read:
        if (check_obs && last_write[ev.target] != t.obs(e)) return false;
        break;
      default: break;
    }
    done[e] = 1;
    ++next[ev.tid];
  }
  return true;
}

}  // namespace

bool is_correct_reordering(const Trace& t, std::span<const EventId> seq) {
  std::vector<std::uint32_t> next;
  return replay(t, seq, next, true);
}

bool exhibits_race(const Trace& t, std::span<const EventId> seq, EventId e1, EventId e2) {
  if (seq.size() < 2) return false;
  EventId a = seq[seq.size() - 2], b = seq[seq.size() - 1];
  if (!((a == e1 && b == e2) || (a == e2 && b == e1))) return false;
  if (t[a].tid == t[b].tid || !conflict(t, a, b)) return false;
  if (t.is_init(a) || t.is_init(b)) return false;
  std::vector<std::uint32_t> next;
  if (!replay(t, seq.subspan(0, seq.size() - 2), next, true)) return false;
  // the racy pair only has to extend the prefix to a trace
  std::vector<EventId> full(seq.begin(), seq.end());
  return replay(t, full, next, false);
}

std::vector<EventId> restrict_to(const Trace& t, const Frontier& f) {
  std::vector<EventId> out;
  out.reserve(frontier_size(f));
  for (std::uint32_t tid = 0; tid < f.size(); ++tid)
    for (std::uint32_t p = 0; p < f[tid]; ++p) out.push_back(t.at(tid, p));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rw
