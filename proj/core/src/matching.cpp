#include "levers/matching.hpp"

#include <algorithm>
#include <limits>

namespace levers {

namespace {

constexpr std::uint32_t kInfinity = std::numeric_limits<std::uint32_t>::max();

bool disabled(std::span<const std::uint8_t> mask, std::size_t i) {
  return !mask.empty() && mask[i] != 0;
}

}  // namespace

std::size_t BipartiteGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency) total += list.size();
  return total;
}

BipartiteGraph to_bipartite(const FcmGraph& graph) {
  BipartiteGraph out;
  out.labels.reserve(graph.size());
  for (const auto& f : graph.factors()) out.labels.push_back(f.id);
  out.adjacency.resize(graph.size());
  for (std::size_t u = 0; u < graph.size(); ++u) {
    for (auto v : graph.successors()[u]) {
      out.adjacency[u].push_back(static_cast<std::uint32_t>(v));
    }
  }
  return out;
}

std::map<FactorId, FactorId> Matching::pairs(const BipartiteGraph& graph) const {
  std::map<FactorId, FactorId> out;
  for (std::size_t v = 0; v < top_of_bottom.size(); ++v) {
    if (top_of_bottom[v] != kUnmatched) {
      out.emplace(graph.labels[v], graph.labels[top_of_bottom[v]]);
    }
  }
  return out;
}

HopcroftKarp::HopcroftKarp(const BipartiteGraph& graph)
    : graph_(&graph),
      top_of_bottom_(graph.size(), kUnmatched),
      bottom_of_top_(graph.size(), kUnmatched),
      level_(graph.size(), kInfinity),
      cursor_(graph.size(), 0) {
  queue_.reserve(graph.size());
}

std::size_t HopcroftKarp::solve(std::span<const std::uint8_t> disabled_tops,
                                std::span<const std::uint8_t> disabled_bottoms) {
  disabled_tops_ = disabled_tops;
  disabled_bottoms_ = disabled_bottoms;
  std::ranges::fill(top_of_bottom_, kUnmatched);
  std::ranges::fill(bottom_of_top_, kUnmatched);

  const auto n = graph_->size();
  std::size_t cardinality = 0;
  while (bfs()) {
    std::ranges::fill(cursor_, 0);
    for (std::uint32_t u = 0; u < n; ++u) {
      if (!disabled(disabled_tops_, u) && bottom_of_top_[u] == kUnmatched &&
          dfs(u)) {
        ++cardinality;
      }
    }
  }
  return cardinality;
}

bool HopcroftKarp::bfs() {
  const auto n = graph_->size();
  queue_.clear();
  for (std::uint32_t u = 0; u < n; ++u) {
    if (!disabled(disabled_tops_, u) && bottom_of_top_[u] == kUnmatched) {
      level_[u] = 0;
      queue_.push_back(u);
    } else {
      level_[u] = kInfinity;
    }
  }
  bool found_free = false;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const auto u = queue_[head];
    for (auto v : graph_->adjacency[u]) {
      if (disabled(disabled_bottoms_, v)) continue;
      const auto w = top_of_bottom_[v];
      if (w == kUnmatched) {
        found_free = true;
      } else if (level_[w] == kInfinity) {
        level_[w] = level_[u] + 1;
        queue_.push_back(static_cast<std::uint32_t>(w));
      }
    }
  }
  return found_free;
}

bool HopcroftKarp::dfs(std::uint32_t u) {
  const auto& edges = graph_->adjacency[u];
  for (auto& i = cursor_[u]; i < edges.size(); ++i) {
    const auto v = edges[i];
    if (disabled(disabled_bottoms_, v)) continue;
    const auto w = top_of_bottom_[v];
    if (w == kUnmatched ||
        (level_[w] == level_[u] + 1 && dfs(static_cast<std::uint32_t>(w)))) {
      top_of_bottom_[v] = static_cast<std::int32_t>(u);
      bottom_of_top_[u] = static_cast<std::int32_t>(v);
      ++i;
      return true;
    }
  }
  level_[u] = kInfinity;
  return false;
}

Matching hopcroft_karp(const BipartiteGraph& graph) {
  HopcroftKarp solver(graph);
  Matching out;
  out.cardinality = solver.solve();
  out.top_of_bottom = solver.top_of_bottom();
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (out.top_of_bottom[v] == kUnmatched) out.unmatched.push_back(graph.labels[v]);
  }
  return out;
}

}  // namespace levers
