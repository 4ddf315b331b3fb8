#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "gscpm/disjoint_set.hpp"

namespace {

using gscpm::DisjointSet;

// Naive oracle: adjacency lists plus DFS reachability.
bool reachable(const std::vector<std::vector<int>>& adj, int from, int to) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return false;
}

TEST(DisjointSet, SingletonsAtStart) {
  DisjointSet dsu(5);
  EXPECT_EQ(dsu.size(), 5u);
  for (std::uint32_t i = 0; i < 5; ++i) EXPECT_EQ(dsu.find(i), i);
  EXPECT_FALSE(dsu.connected(0, 1));
}

TEST(DisjointSet, UniteReportsNewMerges) {
  DisjointSet dsu(4);
  EXPECT_TRUE(dsu.unite(0, 1));
  EXPECT_TRUE(dsu.unite(2, 3));
  EXPECT_FALSE(dsu.unite(1, 0));
  EXPECT_TRUE(dsu.unite(1, 3));
  EXPECT_TRUE(dsu.connected(0, 2));
}

TEST(DisjointSet, RandomizedAgainstReachabilityOracle) {
  std::mt19937 gen(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 40);
    DisjointSet dsu(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int ops = static_cast<int>(gen() % (2 * n));
    for (int k = 0; k < ops; ++k) {
      const int a = pick(gen), b = pick(gen);
      dsu.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
      adj[a].push_back(b);
      adj[b].push_back(a);
      EXPECT_TRUE(dsu.connected(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
    }
    for (int a = 0; a < n; ++a) {
      const auto root = dsu.find(static_cast<std::uint32_t>(a));
      ASSERT_EQ(dsu.find(root), root);
      for (int b = 0; b < n; ++b)
        ASSERT_EQ(dsu.connected(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)),
                  reachable(adj, a, b));
    }
  }
}

}  // namespace
