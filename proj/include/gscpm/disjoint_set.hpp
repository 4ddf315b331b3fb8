#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace gscpm {

// Union-find with union by rank and path compression (halving).
// No rollback: callers copy the structure instead of undoing unions.
class DisjointSet {
public:
  using index_type = std::uint32_t;

  DisjointSet() = default;

  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), index_type{0});
  }

  std::size_t size() const noexcept { return parent_.size(); }

  index_type find(index_type x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false if a and b were already connected.
  bool unite(index_type a, index_type b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  bool connected(index_type a, index_type b) noexcept { return find(a) == find(b); }

private:
  std::vector<index_type> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace gscpm
