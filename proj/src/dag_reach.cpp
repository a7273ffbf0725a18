#include "racewitness/dag_reach.hpp"

#include <algorithm>

namespace rw {

SuffixMin::SuffixMin(std::size_t n) : n_(n) {
  while (size_ < n) size_ <<= 1;
  tree_.assign(2 * size_, kNoNode);
}

void SuffixMin::update(std::size_t j, std::uint32_t v) {
  std::size_t i = size_ + j;
  tree_[i] = v;
  for (i >>= 1; i >= 1; i >>= 1) tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
}

std::uint32_t SuffixMin::min(std::size_t j) const {
  if (j >= n_) return kNoNode;
  std::uint32_t best = kNoNode;
  // padding leaves hold ∞, so [j, size_) is the same as [j, n_)
  for (std::size_t lo = size_ + j, hi = 2 * size_; lo < hi; lo >>= 1, hi >>= 1) {
    if (lo & 1) best = std::min(best, tree_[lo++]);
    if (hi & 1) best = std::min(best, tree_[--hi]);
  }
  return best;
}

std::uint32_t SuffixMin::argleq(std::uint32_t v) const {
  if (n_ == 0 || tree_[1] > v) return kNoNode;
  std::size_t i = 1;
  while (i < size_) i = tree_[2 * i + 1] <= v ? 2 * i + 1 : 2 * i;
  return static_cast<std::uint32_t>(i - size_);
}

PartialOrderDS::PartialOrderDS(std::vector<std::uint32_t> lengths)
    : k_(static_cast<std::uint32_t>(lengths.size())), len_(std::move(lengths)) {
  ft_.resize(static_cast<std::size_t>(k_) * k_);
  for (std::uint32_t a = 0; a < k_; ++a)
    for (std::uint32_t b = 0; b < k_; ++b)
      if (a != b) ft(a, b) = SuffixMin(len_[a]);
  preds_.resize(k_);
  succs_.resize(k_);
}

PartialOrderDS PartialOrderDS::init(std::vector<std::uint32_t> lengths,
                                    const std::vector<std::pair<Node, Node>>& edges) {
  PartialOrderDS ds(std::move(lengths));
  for (const auto& [u, v] : edges) ds.insert(u, v);
  return ds;
}

std::uint32_t PartialOrderDS::successor(Node u, std::uint32_t i) const {
  if (u.chain == i) return u.pos;
  std::uint32_t s = ft(u.chain, i).min(u.pos);
  return s;
}

std::uint32_t PartialOrderDS::predecessor(Node u, std::uint32_t i) const {
  if (u.chain == i) return u.pos;
  return ft(i, u.chain).argleq(u.pos);
}

bool PartialOrderDS::query(Node u, Node v) const {
  if (u.chain == v.chain) return u.pos <= v.pos;
  std::uint32_t s = successor(u, v.chain);
  return s != kNoNode && s <= v.pos;
}

void PartialOrderDS::insert(Node u, Node v, std::vector<std::pair<Node, Node>>* changed) {
  if (query(v, u) && !(u == v)) throw CycleError("edge would close a cycle");
  if (query(u, v)) return;
  for (std::uint32_t i = 0; i < k_; ++i) {
    preds_[i] = predecessor(u, i);
    succs_[i] = successor(v, i);
  }
  for (std::uint32_t a = 0; a < k_; ++a) {
    if (preds_[a] == kNoNode) continue;
    for (std::uint32_t b = 0; b < k_; ++b) {
      if (a == b || succs_[b] == kNoNode) continue;
      SuffixMin& f = ft(a, b);
      if (succs_[b] >= f.min(preds_[a])) continue;
      f.update(preds_[a], succs_[b]);
      if (changed) changed->push_back({Node{a, preds_[a]}, Node{b, succs_[b]}});
    }
  }
}

std::size_t PartialOrderDS::memory_words() const {
  std::size_t w = 0;
  for (std::uint32_t a = 0; a < k_; ++a)
    for (std::uint32_t b = 0; b < k_; ++b)
      if (a != b) w += 2 * std::max<std::size_t>(1, len_[a]);
  return w;
}

}  // namespace rw
