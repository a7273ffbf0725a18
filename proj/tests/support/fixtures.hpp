#pragma once

#include <string>
#include <vector>

#include "racewitness/closure.hpp"
#include "racewitness/trace_io.hpp"

#ifndef RW_TEST_DATA
#error "RW_TEST_DATA must point at tests/data"
#endif

namespace rwtest {

inline rw::Trace fixture(const std::string& name, rw::BuildOptions opt = {}) {
  return rw::parse_file(std::string(RW_TEST_DATA) + "/" + name + ".trace", rw::TraceFormat::Simple, opt);
}

// Event ids from 1-based input positions.
inline rw::EventId ev(const rw::Trace& t, int k) { return t.by_input(k); }

inline std::vector<rw::EventId> evs(const rw::Trace& t, std::initializer_list<int> ks) {
  std::vector<rw::EventId> out;
  for (int k : ks) out.push_back(t.by_input(k));
  return out;
}

inline rw::Edge edge(const rw::Trace& t, int a, int b) { return {t.by_input(a), t.by_input(b)}; }

// Input positions of a witness, dropping the initial writes.
inline std::vector<int> inputs(const rw::Trace& t, const std::vector<rw::EventId>& seq) {
  std::vector<int> out;
  for (rw::EventId e : seq)
    if (!t.is_init(e)) out.push_back(t[e].input);
  return out;
}

}  // namespace rwtest
