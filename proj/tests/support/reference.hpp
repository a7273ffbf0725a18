// Slow, obviously-correct reference implementations used only by tests.
#pragma once

#include <optional>
#include <set>
#include <vector>

#include "racewitness/closure.hpp"
#include "racewitness/dag_reach.hpp"

namespace rwtest {

using rw::EventId;
using rw::Edge;
using rw::Frontier;
using rw::Node;
using rw::Trace;

// Dense boolean relation over the events of a trace; strict order.
struct Relation {
  std::size_t n = 0;
  std::vector<std::uint8_t> m;
  explicit Relation(std::size_t size = 0) : n(size), m(size * size, 0) {}
  bool get(EventId a, EventId b) const { return m[static_cast<std::size_t>(a) * n + b] != 0; }
  bool set(EventId a, EventId b);  // true if new
  bool leq(EventId a, EventId b) const { return a == b || get(a, b); }
  void transitive();
  bool cyclic() const;
};

// Reachability over chains, recomputed by graph search on every question.
class NaiveReach {
 public:
  explicit NaiveReach(std::vector<std::uint32_t> lengths);
  void insert(Node u, Node v) { extra_.push_back({u, v}); }
  bool query(Node u, Node v) const;
  std::uint32_t successor(Node u, std::uint32_t chain) const;
  std::uint32_t predecessor(Node u, std::uint32_t chain) const;

 private:
  std::vector<std::uint8_t> reach_from(Node u) const;
  std::size_t id(Node u) const { return off_[u.chain] + u.pos; }
  std::vector<std::uint32_t> len_, off_;
  std::vector<std::pair<Node, Node>> extra_;
};

// The closure of (respecting order on X) + extra, by repeating the
// observation and lock conditions until nothing changes.  nullopt = cycle.
std::optional<Relation> saturate_closure(const Trace& t, const Frontier& x, const std::vector<Edge>& extra = {});

// Race pairs (a <_t b) of the four partial orders, from explicit relations.
std::vector<Edge> naive_hb(const Trace& t);
std::vector<Edge> naive_shb(const Trace& t);
std::vector<Edge> naive_wcp(const Trace& t);
std::vector<Edge> naive_dc(const Trace& t);

// Per-thread counts of every prefix reachable by a correct reordering.
std::set<Frontier> reachable_states(const Trace& t);

// A uniformly drawn feasible frontier of t (tries a bounded number of times).
std::optional<Frontier> random_feasible(const Trace& t, std::uint64_t seed);

}  // namespace rwtest
