#include "racewitness/closure.hpp"

#include <algorithm>

namespace rw {

class ClosureRun {
 public:
  explicit ClosureRun(ClosedPO& q) : q_(q), t_(*q.t_) {}

  void push(EventId a, EventId b) {
    if (a == kNone || b == kNone || a == b || !q_.contains(a) || !q_.contains(b)) return;
    work_.push_back({a, b});
  }

  // Everything that must follow from a newly established a <= b.
  void step(EventId e1, EventId e2) {
    obs_step(e1, e2);
    lock_step(e1, e2);
  }

  bool drain() {
    std::vector<std::pair<Node, Node>> changed;
    while (!work_.empty()) {
      Edge ed;
      if (q_.opt_.lifo) {
        ed = work_.back();
        work_.pop_back();
      } else {
        ed = work_.front();
        work_.pop_front();
      }
      Node a = q_.node(ed.first), b = q_.node(ed.second);
      if (q_.ds_.query(b, a)) {
        q_.dead_ = true;
        work_.clear();
        return false;
      }
      if (q_.ds_.query(a, b)) continue;
      changed.clear();
      q_.ds_.insert(a, b, &changed);
      q_.log_.push_back(ed);
      for (const auto& [u, v] : changed) step(q_.event(u), q_.event(v));
    }
    return true;
  }

 private:
  void obs_step(EventId e1, EventId e2) {
    for (std::uint32_t x : t_.shared_vars()) {
      EventId w = t_.before(e1, Access::Write, x);
      if (w == kNone) continue;
      // w <= r for a read observing something else: w must precede that write.
      EventId r = t_.after(e2, Access::Read, x);
      if (r != kNone && t_.obs(r) == w) r = t_.next_diff_read(r);
      if (r != kNone && q_.contains(r)) push(w, t_.obs(r));
      // w before a later write: every reader of w precedes that write.
      EventId wb = t_.after(e2, Access::Write, x);
      if (wb == kNone || wb == w || !q_.contains(wb)) continue;
      for (std::uint32_t p = 0; p < t_.thread_count(); ++p) push(t_.flow(w, p, q_.x_[p]), wb);
    }
  }

  void lock_step(EventId e1, EventId e2) {
    for (std::uint32_t l : t_.shared_locks()) {
      EventId acq1 = t_.before(e1, Access::Acquire, l);
      if (acq1 == kNone) continue;
      EventId rel2 = t_.after(e2, Access::Release, l);
      if (rel2 == kNone) continue;
      EventId acq2 = t_.match(rel2);
      if (acq2 == acq1) continue;
      push(t_.match(acq1), acq2);
    }
  }

  ClosedPO& q_;
  const Trace& t_;
  std::deque<Edge> work_;
};

std::vector<Edge> ClosedPO::covering_edges(std::uint32_t skip_thread) const {
  std::vector<Edge> out;
  const std::uint32_t k = static_cast<std::uint32_t>(x_.size());
  for (std::uint32_t a = 0; a < k; ++a) {
    if (a == skip_thread) continue;
    for (std::uint32_t b = 0; b < k; ++b) {
      if (b == a || b == skip_thread) continue;
      for (std::uint32_t j = 0; j < x_[a]; ++j) {
        std::uint32_t s = ds_.successor({a, j}, b);
        if (s == kNoNode) continue;
        if (ds_.predecessor({b, s}, a) == j) out.push_back({t_->at(a, j), t_->at(b, s)});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ClosedPO respect_po(const Trace& t, const Frontier& x, ClosureOptions opt) {
  ClosedPO q;
  q.t_ = &t;
  q.x_ = x;
  q.opt_ = opt;
  std::vector<std::pair<Node, Node>> edges;
  auto add = [&](EventId a, EventId b) {
    if (t[a].tid != t[b].tid) edges.push_back({q.node(a), q.node(b)});
  };
  for (std::uint32_t tid = 0; tid < x.size(); ++tid)
    for (std::uint32_t j = 0; j < x[tid]; ++j) {
      EventId e = t.at(tid, j);
      for (EventId c : t.cross_preds(e)) add(c, e);
      if (t[e].op == Op::Read) add(t.obs(e), e);
    }
  for (EventId a : open_acquires(t, x)) {
    for (std::uint32_t j = 0; j < x.size(); ++j) {
      if (j == t[a].tid || x[j] == 0) continue;
      EventId rel = t.before(t.at(j, x[j] - 1), Access::Release, t[a].target);
      if (rel != kNone) add(rel, a);
    }
  }
  try {
    q.ds_ = PartialOrderDS::init(std::vector<std::uint32_t>(x.begin(), x.end()), edges);
  } catch (const CycleError&) {
    q.dead_ = true;
  }
  return q;
}

bool add_edge(ClosedPO& q, EventId a, EventId b) {
  Node u = q.node(a), v = q.node(b);
  if (q.dead_ || !q.contains(a) || !q.contains(b) || a == b || q.ds_.query(v, u)) return false;
  q.ds_.insert(u, v);
  return true;
}

bool close(ClosedPO& q) {
  if (q.dead_) return false;
  const Trace& t = *q.t_;
  ClosureRun run(q);
  const std::uint32_t k = static_cast<std::uint32_t>(q.x_.size());
  for (std::uint32_t c = 0; c < k; ++c) {
    const std::uint32_t n = q.x_[c];
    // Same-thread pairs only matter between a write and the next event.
    for (std::uint32_t j = 0; j + 1 < n; ++j)
      if (t[t.at(c, j)].op == Op::Write) run.step(t.at(c, j), t.at(c, j + 1));
    // Cross pairs: for each target chain, the last source with a given successor.
    for (std::uint32_t i = 0; i < k; ++i) {
      if (i == c) continue;
      std::uint32_t later = kNoNode;
      for (std::uint32_t j = n; j-- > 0;) {
        std::uint32_t s = q.ds_.successor({c, j}, i);
        if (s != kNoNode && s != later) run.step(t.at(c, j), t.at(i, s));
        later = s;
      }
    }
  }
  return run.drain();
}

bool insert_and_close(ClosedPO& q, EventId a, EventId b) {
  if (q.dead_) return false;
  ClosureRun run(q);
  run.push(a, b);
  return run.drain();
}

}  // namespace rw
