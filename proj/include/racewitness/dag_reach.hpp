#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rw {

inline constexpr std::uint32_t kNoNode = UINT32_MAX;

// Array A over [0, n) with values in N ∪ {∞}: point updates, suffix minima and
// "last index whose value is at most v", each in O(log n).
class SuffixMin {
 public:
  SuffixMin() = default;
  explicit SuffixMin(std::size_t n);

  std::size_t size() const { return n_; }
  std::uint32_t value(std::size_t j) const { return tree_[size_ + j]; }
  void update(std::size_t j, std::uint32_t v);
  // min over A[j..n)
  std::uint32_t min(std::size_t j) const;
  // max { j : A[j] <= v }, or kNoNode
  std::uint32_t argleq(std::uint32_t v) const;

 private:
  std::size_t n_ = 0, size_ = 1;
  std::vector<std::uint32_t> tree_;
};

struct Node {
  std::uint32_t chain = 0;
  std::uint32_t pos = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

class CycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reachability over k chains plus cross edges.  ft(i1, i2).min(j) is the
// lowest position of chain i2 reachable from (i1, j).
class PartialOrderDS {
 public:
  PartialOrderDS() = default;
  explicit PartialOrderDS(std::vector<std::uint32_t> lengths);
  static PartialOrderDS init(std::vector<std::uint32_t> lengths, const std::vector<std::pair<Node, Node>>& edges);

  std::uint32_t chains() const { return k_; }
  std::uint32_t length(std::uint32_t c) const { return len_[c]; }

  bool query(Node u, Node v) const;
  // Lowest position of chain i reachable from u, or kNoNode.
  std::uint32_t successor(Node u, std::uint32_t i) const;
  // Highest position of chain i reaching u, or kNoNode.
  std::uint32_t predecessor(Node u, std::uint32_t i) const;
  // Adds u -> v.  Pairs whose reachability frontier moved are appended to
  // `changed` when given.  Throws CycleError if v already reaches u.
  void insert(Node u, Node v, std::vector<std::pair<Node, Node>>* changed = nullptr);

  std::size_t memory_words() const;

 private:
  SuffixMin& ft(std::uint32_t a, std::uint32_t b) { return ft_[a * k_ + b]; }
  const SuffixMin& ft(std::uint32_t a, std::uint32_t b) const { return ft_[a * k_ + b]; }

  std::uint32_t k_ = 0;
  std::vector<std::uint32_t> len_;
  std::vector<SuffixMin> ft_;
  std::vector<std::uint32_t> preds_, succs_;
};

}  // namespace rw
