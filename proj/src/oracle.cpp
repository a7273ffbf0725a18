#include "racewitness/oracle.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

namespace rw {

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

class Explorer {
 public:
  explicit Explorer(const Trace& t) : t_(t), k_(t.thread_count()) {}

  std::vector<Edge> run() {
    f_.assign(k_, 0);
    last_.assign(t_.var_count(), kNone);
    done_.assign(t_.size(), 0);
    if (t_.has_init_thread()) {
      for (EventId e : t_.thread_events(0)) apply(e);
    }
    dfs();
    std::sort(races_.begin(), races_.end());
    races_.erase(std::unique(races_.begin(), races_.end()), races_.end());
    return races_;
  }

 private:
  EventId next(std::uint32_t i) const {
    return f_[i] < t_.thread_events(i).size() ? t_.at(i, f_[i]) : kNone;
  }

  bool po_ready(EventId e) const {
    for (EventId c : t_.cross_preds(e))
      if (!done_[c]) return false;
    return true;
  }

  bool lock_free(std::uint32_t lock) const {
    for (std::uint32_t i = 0; i < k_; ++i)
      for (EventId a = t_.held_top(i, f_[i]); a != kNone; a = t_.held_parent(a))
        if (t_[a].target == lock) return false;
    return true;
  }

  bool can_run(EventId e) const {
    if (!po_ready(e)) return false;
    const Event& ev = t_[e];
    if (ev.op == Op::Acquire) return lock_free(ev.target);
    if (ev.op == Op::Read) return last_[ev.target] == t_.obs(e);
    return true;
  }

  void apply(EventId e) {
    const Event& ev = t_[e];
    ++f_[ev.tid];
    done_[e] = 1;
    if (ev.op == Op::Write) last_[ev.target] = e;
  }

  void dfs() {
    std::vector<std::int32_t> key(f_.begin(), f_.end());
    key.insert(key.end(), last_.begin(), last_.end());
    if (!seen_.insert(std::move(key)).second) return;

    std::vector<EventId> heads(k_, kNone);
    for (std::uint32_t i = 0; i < k_; ++i) {
      EventId e = next(i);
      if (e != kNone && po_ready(e)) heads[i] = e;
    }
    for (std::uint32_t i = 0; i < k_; ++i)
      for (std::uint32_t j = i + 1; j < k_; ++j)
        if (heads[i] != kNone && heads[j] != kNone && conflict(t_, heads[i], heads[j]) && !t_.is_init(heads[i]) &&
            !t_.is_init(heads[j]))
          races_.push_back({std::min(heads[i], heads[j]), std::max(heads[i], heads[j])});

    for (std::uint32_t i = 0; i < k_; ++i) {
      EventId e = heads[i];
      if (e == kNone || !can_run(e)) continue;
      const bool w = t_[e].op == Op::Write;
      EventId saved = w ? last_[t_[e].target] : kNone;
      apply(e);
      dfs();
      --f_[i];
      done_[e] = 0;
      if (w) last_[t_[e].target] = saved;
    }
  }

  const Trace& t_;
  const std::uint32_t k_;
  Frontier f_;
  std::vector<std::int32_t> last_;
  std::vector<std::uint8_t> done_;
  std::unordered_set<std::vector<std::int32_t>, KeyHash> seen_;
  std::vector<Edge> races_;
};

}  // namespace

std::vector<Edge> oracle_races(const Trace& t, std::size_t max_events) {
  const std::size_t cap = std::min(max_events, kOracleHardCap);
  if (static_cast<std::size_t>(t.input_count()) > cap)
    throw TooLarge("oracle limited to " + std::to_string(cap) + " events");
  return Explorer(t).run();
}

std::vector<RawEvent> random_events(std::uint64_t seed, const RandomParams& prm) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint32_t n) { return std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };
  const std::uint32_t k = std::max<std::uint32_t>(1, prm.threads);
  auto tname = [](std::uint32_t i) { return "T" + std::to_string(i + 1); };

  std::vector<RawEvent> out;
  std::vector<std::vector<std::uint32_t>> held(k);
  std::vector<int> holder(prm.locks, -1);
  std::vector<std::uint8_t> started(k, 0), joined(k, 0);
  auto emit = [&](std::uint32_t tid, Op op, std::string target) {
    RawEvent r;
    r.thread = tname(tid);
    r.op = op;
    r.target = std::move(target);
    r.line = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(r));
    started[tid] = 1;
  };

  if (prm.fork_join)
    for (std::uint32_t i = 1; i < k && out.size() < prm.events; ++i)
      if (chance(0.5)) emit(0, Op::Fork, tname(i));

  while (out.size() < prm.events) {
    std::uint32_t tid = pick(k);
    if (joined[tid]) continue;
    auto& h = held[tid];
    if (prm.fork_join && tid == 0 && h.empty() && chance(0.1)) {
      std::uint32_t c = 1 + pick(std::max<std::uint32_t>(1, k - 1));
      if (c < k && started[c] && !joined[c] && held[c].empty()) {
        emit(0, Op::Join, tname(c));
        joined[c] = 1;
        continue;
      }
    }
    if (prm.locks > 0 && chance(prm.lock_rate)) {
      if (!h.empty() && chance(0.5)) {
        std::uint32_t l = h.back();
        h.pop_back();
        holder[l] = -1;
        emit(tid, Op::Release, "l" + std::to_string(l));
        continue;
      }
      std::uint32_t l = pick(prm.locks);
      if (holder[l] < 0) {
        holder[l] = static_cast<int>(tid);
        h.push_back(l);
        emit(tid, Op::Acquire, "l" + std::to_string(l));
        continue;
      }
    }
    std::uint32_t x = pick(std::max<std::uint32_t>(1, prm.vars));
    emit(tid, chance(prm.write_rate) ? Op::Write : Op::Read, "x" + std::to_string(x));
  }
  if (prm.close_locks)
    for (std::uint32_t tid = 0; tid < k; ++tid)
      while (!held[tid].empty() && !joined[tid]) {
        emit(tid, Op::Release, "l" + std::to_string(held[tid].back()));
        held[tid].pop_back();
      }
  return out;
}

Trace random_trace(std::uint64_t seed, const RandomParams& params) {
  return build_trace(random_events(seed, params));
}

}  // namespace rw
