#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "levers/fcm.hpp"

namespace levers {

/// Bipartite double cover of a digraph: every factor has an out-copy on the
/// top side and an in-copy on the bottom side, and each link u -> v becomes
/// the edge (u_top, v_bottom). Index i names both copies of factor i.
struct BipartiteGraph {
  std::vector<FactorId> labels;
  // Top index -> bottom indices, ascending.
  std::vector<std::vector<std::uint32_t>> adjacency;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t edge_count() const;
};

BipartiteGraph to_bipartite(const FcmGraph& graph);

inline constexpr std::int32_t kUnmatched = -1;

struct Matching {
  // Bottom index -> matched top index, or kUnmatched.
  std::vector<std::int32_t> top_of_bottom;
  std::size_t cardinality = 0;
  // Factors whose bottom copy has no matched in-edge, sorted.
  std::vector<FactorId> unmatched;

  /// Matched pairs as bottom id -> top id.
  std::map<FactorId, FactorId> pairs(const BipartiteGraph& graph) const;
};

/// Reusable Hopcroft-Karp solver over a fixed bipartite graph. Individual
/// runs may disable top nodes (drop a factor's out-links) or bottom nodes
/// (drop a factor's in-links) without rebuilding the graph.
///
/// Free tops are processed in ascending index and adjacency lists are walked
/// in ascending order, so the returned matching is deterministic.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(const BipartiteGraph& graph);

  /// Maximum matching cardinality. Empty masks disable nothing; otherwise a
  /// mask must have one entry per node, nonzero meaning disabled.
  std::size_t solve(std::span<const std::uint8_t> disabled_tops = {},
                    std::span<const std::uint8_t> disabled_bottoms = {});

  /// State of the most recent solve().
  const std::vector<std::int32_t>& top_of_bottom() const noexcept {
    return top_of_bottom_;
  }
  const std::vector<std::int32_t>& bottom_of_top() const noexcept {
    return bottom_of_top_;
  }

 private:
  bool bfs();
  bool dfs(std::uint32_t top);

  const BipartiteGraph* graph_;
  std::span<const std::uint8_t> disabled_tops_;
  std::span<const std::uint8_t> disabled_bottoms_;
  std::vector<std::int32_t> top_of_bottom_;
  std::vector<std::int32_t> bottom_of_top_;
  std::vector<std::uint32_t> level_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::size_t> cursor_;
};

Matching hopcroft_karp(const BipartiteGraph& graph);

}  // namespace levers
