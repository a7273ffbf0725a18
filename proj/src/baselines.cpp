#include "racewitness/baselines.hpp"

#include <algorithm>
#include <deque>

namespace rw {

const char* method_name(Method m) {
  switch (m) {
    case Method::HB: return "hb";
    case Method::SHB: return "shb";
    case Method::WCP: return "wcp";
    case Method::DC: return "dc";
  }
  return "?";
}

bool method_from(const std::string& s, Method& m) {
  if (s == "hb") m = Method::HB;
  else if (s == "shb") m = Method::SHB;
  else if (s == "wcp") m = Method::WCP;
  else if (s == "dc") m = Method::DC;
  else return false;
  return true;
}

namespace {

using VC = std::vector<std::uint32_t>;

void join(VC& a, const VC& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::max(a[i], b[i]);
}

bool leq(const VC& a, const VC& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

// Per-access timestamps; a <_t b is ordered iff stamp[b][tid a] >= stamp[a][tid a].
struct Stamps {
  std::vector<VC> of;  // indexed by event, empty for non-accesses

  std::vector<Edge> unordered(const Trace& t) const {
    std::vector<std::vector<EventId>> by_var(t.var_count());
    for (const Event& ev : t.events())
      if (is_access(ev.op) && !t.is_init(ev.id)) by_var[ev.target].push_back(ev.id);
    std::vector<Edge> out;
    for (const auto& evs : by_var)
      for (std::size_t j = 0; j < evs.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
          EventId a = evs[i], b = evs[j];
          if (t[a].tid == t[b].tid || !conflict(t, a, b)) continue;
          std::uint32_t ta = t[a].tid;
          if (of[b][ta] < of[a][ta]) out.push_back({a, b});
        }
    std::sort(out.begin(), out.end());
    return out;
  }
};

std::vector<std::uint8_t> cross_sources(const Trace& t) {
  std::vector<std::uint8_t> src(t.size(), 0);
  for (const Event& ev : t.events())
    for (EventId c : t.cross_preds(ev.id)) src[c] = 1;
  return src;
}

// Happens-before, optionally with reads ordered after the write they observe.
std::vector<Edge> hb_like(const Trace& t, bool schedulable) {
  const std::uint32_t k = t.thread_count();
  std::vector<VC> c(k, VC(k, 0)), lk(t.lock_count(), VC(k, 0)), lw(t.var_count(), VC(k, 0));
  for (std::uint32_t i = 0; i < k; ++i) c[i][i] = 1;
  auto src = cross_sources(t);
  std::vector<VC> saved(t.size());
  Stamps st;
  st.of.resize(t.size());
  for (const Event& ev : t.events()) {
    VC& me = c[ev.tid];
    for (EventId s : t.cross_preds(ev.id)) join(me, saved[s]);
    switch (ev.op) {
      case Op::Acquire: join(me, lk[ev.target]); break;
      case Op::Release: lk[ev.target] = me; break;
      case Op::Read:
        if (schedulable) join(me, lw[ev.target]);
        break;
      case Op::Write:
        if (schedulable) lw[ev.target] = me;
        break;
      default: break;
    }
    if (is_access(ev.op)) st.of[ev.id] = me;
    if (src[ev.id]) saved[ev.id] = me;
    ++me[ev.tid];
  }
  return st.unordered(t);
}

// Weak-causally-precedes (with_hb) or its variant without happens-before
// composition.  Clocks follow the queue-based one-pass construction.
std::vector<Edge> wcp_like(const Trace& t, bool with_hb) {
  const std::uint32_t k = t.thread_count();
  const std::size_t nl = t.lock_count(), nv = t.var_count();
  // h: happens-before clock (unused without composition), p: the order itself
  std::vector<VC> h(k, VC(k, 0)), p(k, VC(k, 0));
  for (std::uint32_t i = 0; i < k; ++i) h[i][i] = 1;
  std::vector<VC> hl(nl, VC(k, 0)), pl(nl, VC(k, 0));
  // last release time of critical sections on (lock, var) that read / wrote var
  std::vector<std::vector<VC>> lr(nl), lwr(nl);
  // per lock, per thread: acquire and release times of other threads' sections
  std::vector<std::vector<std::deque<VC>>> acq_q(nl, std::vector<std::deque<VC>>(k)),
      rel_q(nl, std::vector<std::deque<VC>>(k));
  // accesses made inside each open acquire
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> touched(t.size());
  std::vector<std::vector<EventId>> held(k);

  auto src = cross_sources(t);
  std::vector<VC> saved_h(t.size()), saved_c(t.size());
  Stamps st;
  st.of.resize(t.size());

  auto now = [&](std::uint32_t tid) {
    VC c = p[tid];
    c[tid] = h[tid][tid];
    return c;
  };
  auto slot = [&](std::vector<VC>& v, std::uint32_t x) -> VC& {
    if (v.empty()) v.assign(nv, VC(k, 0));
    return v[x];
  };
  // time of a release as seen by later events: happens-before time, or the
  // order's own time when there is no composition
  auto rel_time = [&](std::uint32_t tid) { return with_hb ? h[tid] : now(tid); };

  for (const Event& ev : t.events()) {
    const std::uint32_t tid = ev.tid;
    for (EventId s : t.cross_preds(ev.id)) {
      join(h[tid], saved_h[s]);
      join(p[tid], saved_c[s]);
    }
    switch (ev.op) {
      case Op::Acquire: {
        const std::uint32_t l = ev.target;
        if (with_hb) {
          join(h[tid], hl[l]);
          join(p[tid], pl[l]);
        }
        VC c = now(tid);
        for (std::uint32_t o = 0; o < k; ++o)
          if (o != tid) acq_q[l][o].push_back(c);
        held[tid].push_back(ev.id);
        break;
      }
      case Op::Release: {
        const std::uint32_t l = ev.target;
        auto& aq = acq_q[l][tid];
        auto& rq = rel_q[l][tid];
        while (!aq.empty() && !rq.empty() && leq(aq.front(), now(tid))) {
          aq.pop_front();
          join(p[tid], rq.front());
          rq.pop_front();
        }
        VC rt = rel_time(tid);
        EventId a = t.match(ev.id);
        for (auto [x, wr] : touched[a]) join(slot(wr ? lwr[l] : lr[l], x), rt);
        touched[a].clear();
        touched[a].shrink_to_fit();
        if (with_hb) {
          hl[l] = h[tid];
          pl[l] = p[tid];
        }
        for (std::uint32_t o = 0; o < k; ++o)
          if (o != tid) rel_q[l][o].push_back(rt);
        held[tid].pop_back();
        break;
      }
      case Op::Read:
      case Op::Write: {
        const bool wr = ev.op == Op::Write;
        for (EventId a : held[tid]) {
          const std::uint32_t l = t[a].target;
          if (!lwr[l].empty()) join(p[tid], lwr[l][ev.target]);
          if (wr && !lr[l].empty()) join(p[tid], lr[l][ev.target]);
          touched[a].push_back({ev.target, wr});
        }
        break;
      }
      default: break;
    }
    if (!with_hb) h[tid] = now(tid);  // keep the local counter in one place
    if (is_access(ev.op)) st.of[ev.id] = now(tid);
    if (src[ev.id]) {
      saved_h[ev.id] = h[tid];
      saved_c[ev.id] = now(tid);
    }
    ++h[tid][tid];
  }
  return st.unordered(t);
}

}  // namespace

std::vector<Edge> hb_races(const Trace& t) { return hb_like(t, false); }
std::vector<Edge> shb_races(const Trace& t) { return hb_like(t, true); }
std::vector<Edge> wcp_races(const Trace& t) { return wcp_like(t, true); }
std::vector<Edge> dc_races(const Trace& t) { return wcp_like(t, false); }

std::vector<Edge> baseline_races(const Trace& t, Method m) {
  switch (m) {
    case Method::HB: return hb_races(t);
    case Method::SHB: return shb_races(t);
    case Method::WCP: return wcp_races(t);
    case Method::DC: return dc_races(t);
  }
  return {};
}

}  // namespace rw
