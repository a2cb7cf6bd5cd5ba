#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "levers/errors.hpp"
#include "levers/matching.hpp"
#include "support/oracles.hpp"

namespace levers {
namespace {

using testing::make_graph;
using testing::max_matching_brute;

TEST(ToBipartite, Examples) {
  auto bg = to_bipartite(make_graph({"a", "b"}, {{"a", "b"}}));
  EXPECT_EQ(bg.labels, (std::vector<FactorId>{"a", "b"}));
  EXPECT_EQ(bg.adjacency, (std::vector<std::vector<std::uint32_t>>{{1}, {}}));

  bg = to_bipartite(make_graph({"a", "b"}, {{"a", "b"}, {"b", "a"}}));
  EXPECT_EQ(bg.adjacency, (std::vector<std::vector<std::uint32_t>>{{1}, {0}}));

  bg = to_bipartite(make_graph({"a", "b", "c"}, {}));
  EXPECT_EQ(bg.size(), 3u);
  EXPECT_EQ(bg.edge_count(), 0u);
}

TEST(HopcroftKarp, Path) {
  const auto bg = to_bipartite(make_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}));
  const auto m = hopcroft_karp(bg);
  EXPECT_EQ(m.cardinality, 2u);
  EXPECT_EQ(m.unmatched, std::vector<FactorId>{"a"});
  EXPECT_EQ(m.pairs(bg), (std::map<FactorId, FactorId>{{"b", "a"}, {"c", "b"}}));
}

TEST(HopcroftKarp, StarTieBreaksBySortedId) {
  const auto bg = to_bipartite(make_graph({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}}));
  const auto m = hopcroft_karp(bg);
  EXPECT_EQ(m.cardinality, 1u);
  EXPECT_EQ(m.unmatched, (std::vector<FactorId>{"a", "c"}));
}

TEST(HopcroftKarp, CycleIsPerfect) {
  const auto m = hopcroft_karp(to_bipartite(make_graph({"a", "b"}, {{"a", "b"}, {"b", "a"}})));
  EXPECT_EQ(m.cardinality, 2u);
  EXPECT_TRUE(m.unmatched.empty());
}

TEST(HopcroftKarp, DisabledNodesDropTheirEdges) {
  const auto bg = to_bipartite(make_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}));
  HopcroftKarp solver(bg);
  const std::vector<std::uint8_t> no_in_b{0, 1, 0};
  EXPECT_EQ(solver.solve({}, no_in_b), 1u);
  const std::vector<std::uint8_t> no_out_a{1, 0, 0};
  EXPECT_EQ(solver.solve(no_out_a, {}), 1u);
  EXPECT_EQ(solver.solve(), 2u);
}

TEST(MaxMatchingBrute, Examples) {
  EXPECT_EQ(max_matching_brute(to_bipartite(make_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}))),
            2u);
  std::vector<testing::Edge> complete;
  for (auto s : {"a", "b", "c"}) {
    for (auto t : {"a", "b", "c"}) {
      if (std::string(s) != t) complete.emplace_back(s, t);
    }
  }
  // Complete bipartite 3+3 (the double cover also carries the diagonal).
  auto bg = to_bipartite(make_graph({"a", "b", "c"}, complete));
  for (std::uint32_t i = 0; i < 3; ++i) bg.adjacency[i] = {0, 1, 2};
  EXPECT_EQ(max_matching_brute(bg), 3u);
  EXPECT_EQ(max_matching_brute(to_bipartite(make_graph({"a", "b", "c"}, {}))), 0u);
}

TEST(MaxMatchingBrute, SizeGuard) {
  BipartiteGraph big;
  big.labels.resize(16);
  big.adjacency.resize(16);
  EXPECT_THROW(max_matching_brute(big), InvalidArgument);
}

// Cardinality agrees with exhaustive search; pairs are injective, lie on
// edges and agree with the unmatched list; disabling one bottom node moves
// the cardinality by at most one.
TEST(MatchingProperties, AgreeWithExhaustiveSearch) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(1 + trial % 12);
    const auto g = testing::random_graph(rng, {n, 0.1 + 0.1 * (trial % 5), false});
    const auto bg = to_bipartite(g);
    const auto m = hopcroft_karp(bg);
    ASSERT_EQ(m.cardinality, max_matching_brute(bg));

    std::set<std::int32_t> tops;
    std::size_t matched = 0;
    for (std::size_t v = 0; v < n; ++v) {
      const auto u = m.top_of_bottom[v];
      if (u == kUnmatched) continue;
      ++matched;
      ASSERT_TRUE(tops.insert(u).second);
      const auto& adj = bg.adjacency[static_cast<std::size_t>(u)];
      ASSERT_NE(std::ranges::find(adj, v), adj.end());
    }
    ASSERT_EQ(matched, m.cardinality);
    ASSERT_EQ(m.unmatched.size(), n - m.cardinality);

    HopcroftKarp solver(bg);
    std::vector<std::uint8_t> mask(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      mask[v] = 1;
      const auto reduced = solver.solve({}, mask);
      ASSERT_LE(reduced, m.cardinality);
      ASSERT_GE(reduced + 1, m.cardinality);
      mask[v] = 0;
    }
  }
}

}  // namespace
}  // namespace levers
