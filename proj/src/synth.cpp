#include "racewitness/synth.hpp"

#include <random>
#include <string>

namespace rw {

std::vector<RawEvent> synthetic_events(std::uint64_t seed, const SynthParams& p) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
  auto chance = [&](double q) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < q; };

  struct State {
    int lock = -1;
    std::uint32_t left = 0;
  };
  std::vector<State> st(p.threads);
  std::vector<int> holder(p.locks, -1);
  std::vector<RawEvent> out;
  out.reserve(p.events + p.threads);
  std::vector<std::string> tnames;
  for (std::uint32_t i = 0; i < p.threads; ++i) tnames.push_back("T" + std::to_string(i + 1));

  auto emit = [&](std::uint32_t tid, Op op, std::string target, std::string loc = {}) {
    RawEvent r;
    r.thread = tnames[tid];
    r.op = op;
    r.target = std::move(target);
    r.location = std::move(loc);
    r.line = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(r));
  };
  const std::uint64_t window = static_cast<std::uint64_t>(p.racy_in_cs_window * static_cast<double>(p.events));
  std::uint32_t planted = 0;

  while (out.size() + p.threads < p.events) {
    const auto tid = static_cast<std::uint32_t>(pick(p.threads));
    State& s = st[tid];
    if (s.lock >= 0) {
      const auto l = static_cast<std::uint32_t>(s.lock);
      if (s.left == 0) {
        emit(tid, Op::Release, "L" + std::to_string(l));
        holder[l] = -1;
        s.lock = -1;
        continue;
      }
      --s.left;
      if (planted < p.racy_in_cs && out.size() < window && chance(0.05)) {
        ++planted;
        std::uint32_t f = static_cast<std::uint32_t>(pick(std::max<std::uint32_t>(1, p.racy_vars)));
        emit(tid, chance(0.5) ? Op::Write : Op::Read, "flag" + std::to_string(f), "cs_flag" + std::to_string(f));
        continue;
      }
      std::uint32_t v = static_cast<std::uint32_t>(pick(p.vars_per_lock));
      emit(tid, chance(0.4) ? Op::Write : Op::Read, "g" + std::to_string(l) + "_" + std::to_string(v));
      continue;
    }
    if (p.locks > 0 && chance(p.cs_rate)) {
      auto l = static_cast<std::uint32_t>(pick(p.locks));
      if (holder[l] < 0) {
        holder[l] = static_cast<int>(tid);
        s.lock = static_cast<int>(l);
        s.left = 1 + static_cast<std::uint32_t>(pick(p.cs_len));
        emit(tid, Op::Acquire, "L" + std::to_string(l));
        continue;
      }
    }
    if (p.racy_vars > 0 && chance(p.racy_rate)) {
      std::uint32_t f = static_cast<std::uint32_t>(pick(p.racy_vars));
      emit(tid, chance(0.5) ? Op::Write : Op::Read, "flag" + std::to_string(f), "flag" + std::to_string(f) + "_" + tnames[tid]);
      continue;
    }
    emit(tid, chance(0.5) ? Op::Write : Op::Read, "local" + std::to_string(tid) + "_" + std::to_string(pick(4)));
  }
  for (std::uint32_t tid = 0; tid < p.threads; ++tid)
    if (st[tid].lock >= 0) emit(tid, Op::Release, "L" + std::to_string(st[tid].lock));
  return out;
}

}  // namespace rw
