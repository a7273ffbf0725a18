#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace rw;
using rwtest::ev;

TEST_CASE("simple format parses ops, comments and locations") {
  Trace t = parse_string(
      "# header\n"
      "T1 W x @a.c:3\n"
      "T2 read x   # trailing\r\n"
      "\n"
      "T2 acq m\n"
      "T2 REL m\n");
  CHECK(t.input_count() == 4);
  CHECK(t.has_init_thread());
  CHECK(t.thread_count() == 3);
  const Event& w = t[ev(t, 1)];
  CHECK(w.op == Op::Write);
  CHECK(t.location(w.loc) == "a.c:3");
  CHECK(w.line == 2);
  CHECK(t.obs(ev(t, 2)) == ev(t, 1));
  CHECK(t.match(ev(t, 3)) == ev(t, 4));
  CHECK(t.match(ev(t, 4)) == ev(t, 3));
  CHECK(format_event(t, ev(t, 1)) == "T1 w x @a.c:3");
}

TEST_CASE("std format") {
  Trace t = parse_string("T0|w(V1)|L10\nT1|r(V1)|L11\nT1|acq(M)|L12\nT1|rel(M)|L13\n", TraceFormat::Std);
  CHECK(t.input_count() == 4);
  CHECK(t.thread_name(t[ev(t, 1)].tid) == "T0");
  CHECK(t.location(t[ev(t, 2)].loc) == "L11");
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_string(text);
    } catch (const ParseError& e) {
      return e.line();
    } catch (const MalformedTrace& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("T1 w x\nT1 jump x\n") == 2);
  CHECK(line_of("T1 w\n") == 1);
  CHECK(line_of("thread w x\n") == 1);
  CHECK(line_of("T1 w x @\n") == 1);
  CHECK(line_of("# nothing\n") == 0);
}

TEST_CASE("malformed traces are rejected") {
  CHECK_THROWS_AS(parse_string("T1 acq l\nT1 acq l\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 acq l\nT2 acq l\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 rel l\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 acq l\nT2 rel l\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 acq a\nT1 acq b\nT1 rel a\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T2 w x\nT1 fork T2\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 fork T1\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 fork T2\nT2 w x\nT1 join T2\nT2 w x\n"), MalformedTrace);
  CHECK_THROWS_AS(parse_string("init|w(x)|L1\n", TraceFormat::Std), MalformedTrace);
  CHECK_THROWS_AS(parse_string("T1 r x\n", TraceFormat::Simple, BuildOptions{false}), MalformedTrace);
  CHECK_NOTHROW(parse_string("T1 r x\n"));
}

TEST_CASE("fork and join become cross-thread program order") {
  Trace t = parse_string("T1 fork T2\nT2 w x\nT2 r x\nT1 join T2\nT1 w x\n");
  auto forked = t.cross_preds(ev(t, 2));
  CHECK(std::find(forked.begin(), forked.end(), ev(t, 1)) != forked.end());
  auto joined = t.cross_preds(ev(t, 4));
  REQUIRE(joined.size() == 1);
  CHECK(joined[0] == ev(t, 3));
}

TEST_CASE("odd fork/join usage warns and is skipped") {
  Trace t = parse_string("T1 fork T2\nT1 fork T2\nT2 w x\nT1 join T3\nT1 w x\n");
  CHECK(t.warnings().size() == 2);
  CHECK(t.cross_preds(ev(t, 4)).empty());
}

TEST_CASE("initial writes come first and precede every thread") {
  Trace t = parse_string("T1 w x\nT2 r y\n");
  REQUIRE(t.size() == 4);
  CHECK(t.is_init(0));
  CHECK(t.is_init(1));
  CHECK(t.obs(ev(t, 2)) == 1);  // the initial write of y
  auto preds = t.cross_preds(ev(t, 1));
  REQUIRE(preds.size() == 1);
  CHECK(preds[0] == 1);
  Trace bare = parse_string("T1 w x\nT2 r x\n", TraceFormat::Simple, BuildOptions{false});
  CHECK(bare.size() == 2);
  CHECK_FALSE(bare.has_init_thread());
  CHECK(bare.cross_preds(1).empty());
}

TEST_CASE("event maps") {
  Trace t = parse_string(
      "T1 w x\n"   // 1
      "T1 r x\n"   // 2
      "T2 w x\n"   // 3
      "T1 r x\n"   // 4
      "T1 r x\n"   // 5
      "T1 acq l\n" // 6
      "T1 w x\n"   // 7
      "T1 rel l\n" // 8
      "T2 r x\n"); // 9
  const std::uint32_t x = t[ev(t, 1)].target, l = t[ev(t, 6)].target;
  CHECK(t.after(ev(t, 1), Access::Read, x) == ev(t, 2));
  CHECK(t.after(ev(t, 5), Access::Read, x) == ev(t, 5));
  CHECK(t.after(ev(t, 6), Access::Read, x) == kNone);
  CHECK(t.before(ev(t, 5), Access::Write, x) == ev(t, 1));
  CHECK(t.before(ev(t, 8), Access::Write, x) == ev(t, 7));
  CHECK(t.before(ev(t, 7), Access::Acquire, l) == ev(t, 6));
  CHECK(t.after(ev(t, 7), Access::Release, l) == ev(t, 8));
  // 2 observes 1, 4 and 5 observe 3
  CHECK(t.next_diff_read(ev(t, 2)) == ev(t, 4));
  CHECK(t.next_diff_read(ev(t, 4)) == kNone);
  CHECK(t.flow(ev(t, 3), t[ev(t, 1)].tid) == ev(t, 5));
  CHECK(t.flow(ev(t, 3), t[ev(t, 1)].tid, t[ev(t, 5)].pos) == ev(t, 4));
  CHECK(t.flow(ev(t, 3), t[ev(t, 1)].tid, t[ev(t, 4)].pos) == kNone);
  CHECK(t.flow(ev(t, 7), t[ev(t, 3)].tid) == ev(t, 9));
  CHECK(t.enclosing(ev(t, 7)) == ev(t, 6));
  CHECK(t.enclosing(ev(t, 6)) == kNone);
  CHECK(t.enclosing(ev(t, 8)) == kNone);
}

TEST_CASE("down() is the least set closed under program order and observation") {
  Trace t = rwtest::fixture("nested_locks");
  auto d = t.down(ev(t, 12));  // T3 r z observes T2 w z
  const std::uint32_t t1 = t[ev(t, 1)].tid, t2 = t[ev(t, 5)].tid, t3 = t[ev(t, 11)].tid;
  CHECK(d[t1] == 0);
  CHECK(d[t2] == 3);
  CHECK(d[t3] == 2);
  CHECK(d[0] == t.thread_events(0).size());
}

TEST_CASE("feasibility predicates agree between representations") {
  Trace t = rwtest::fixture("lock_handoff");
  Frontier ok(t.thread_count(), 0), open_two(t.thread_count(), 0);
  ok[0] = static_cast<std::uint32_t>(t.thread_events(0).size());
  open_two = ok;
  ok[t[ev(t, 1)].tid] = 1;  // T1 holds l
  ok[t[ev(t, 4)].tid] = 3;  // T2 finished its section
  CHECK(is_feasible(t, ok));
  CHECK(is_feasible(t, EventSet::from_frontier(t, ok)));
  open_two[t[ev(t, 1)].tid] = 1;
  open_two[t[ev(t, 4)].tid] = 1;  // both hold l
  CHECK_FALSE(is_feasible(t, open_two));
  CHECK_FALSE(is_feasible(t, EventSet::from_frontier(t, open_two)));
  CHECK(open_acquires(t, ok) == std::vector<EventId>{ev(t, 1)});
  EventSet gap = EventSet::from_frontier(t, ok);
  gap.erase(ev(t, 4));
  CHECK_FALSE(is_prefix_closed(t, gap));
}

TEST_CASE("replay checks") {
  Trace t = rwtest::fixture("lock_handoff");
  std::vector<EventId> w = rwtest::evs(t, {4, 5, 6, 1, 2, 7});
  std::vector<EventId> full = {0};
  full.insert(full.end(), w.begin(), w.end());
  CHECK(exhibits_race(t, full, ev(t, 2), ev(t, 7)));
  CHECK_FALSE(exhibits_race(t, w, ev(t, 2), ev(t, 7)));  // initial write missing
  std::vector<EventId> swapped = full;
  std::swap(swapped[1], swapped[4]);
  CHECK_FALSE(exhibits_race(t, swapped, ev(t, 2), ev(t, 7)));
  std::vector<EventId> whole;
  for (const Event& e : t.events()) whole.push_back(e.id);
  CHECK(is_correct_reordering(t, whole));
  // the read would see the other write
  std::vector<EventId> wrong = {0};
  for (int k : {4, 5, 6, 1, 2, 3, 7}) wrong.push_back(ev(t, k));
  CHECK_FALSE(is_correct_reordering(t, wrong));
}

TEST_CASE("witness emission skips initial writes") {
  Trace t = rwtest::fixture("lock_handoff");
  std::vector<EventId> seq = {0, ev(t, 4), ev(t, 5)};
  std::ostringstream out;
  emit_witness(t, seq, out);
  CHECK(out.str() == "T2 acq l # e4\nT2 w x # e5\n");
  std::ostringstream all;
  emit_trace(t, all);
  Trace again = parse_string(all.str());
  CHECK(again.size() == t.size());
}
