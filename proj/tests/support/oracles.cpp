#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "levers/errors.hpp"

namespace levers::testing {

FcmGraph make_graph(const std::vector<std::string>& ids, const std::vector<Edge>& edges) {
  std::vector<Factor> factors;
  for (const auto& id : ids) factors.push_back({id, id, Controllability::Medium, false});
  std::vector<Influence> links;
  for (const auto& [s, t] : edges) links.push_back({s, t, Sign::Positive, Strength::Medium});
  return FcmGraph(std::move(factors), std::move(links));
}

std::vector<std::uint32_t> matchable_bottom_sets(const BipartiteGraph& graph) {
  const auto n = graph.size();
  if (n > 15) throw InvalidArgument("brute-force matching limited to 15 nodes");
  std::vector<char> reachable(std::size_t{1} << n, 0);
  reachable[0] = 1;
  for (std::size_t top = 0; top < n; ++top) {
    auto next = reachable;
    for (std::uint32_t mask = 0; mask < reachable.size(); ++mask) {
      if (!reachable[mask]) continue;
      for (auto bottom : graph.adjacency[top]) {
        if (!(mask >> bottom & 1u)) next[mask | (1u << bottom)] = 1;
      }
    }
    reachable = std::move(next);
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 0; mask < reachable.size(); ++mask) {
    if (reachable[mask]) out.push_back(mask);
  }
  return out;
}

std::size_t max_matching_brute(const BipartiteGraph& graph) {
  std::size_t best = 0;
  for (auto mask : matchable_bottom_sets(graph)) {
    best = std::max<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

namespace {

std::vector<std::vector<std::size_t>> undirected_components(const FcmGraph& graph) {
  const auto n = graph.size();
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (const auto& link : graph.influences()) {
    auto s = *graph.index_of(link.source), t = *graph.index_of(link.target);
    neighbours[s].push_back(t);
    neighbours[t].push_back(s);
  }
  std::vector<int> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> group, stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      group.push_back(u);
      for (auto v : neighbours[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::ranges::sort(group);
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace

std::vector<std::vector<FactorId>> brute_force_configurations(const FcmGraph& graph) {
  if (graph.size() > 12) throw InvalidArgument("brute-force enumeration limited to 12 nodes");
  for (const auto& link : graph.influences()) {
    if (link.source == link.target) throw InvalidArgument("self-loop");
  }

  std::vector<std::vector<std::vector<FactorId>>> per_component;
  for (const auto& nodes : undirected_components(graph)) {
    const auto n = nodes.size();
    std::map<std::size_t, std::uint32_t> local;
    for (std::size_t i = 0; i < n; ++i) local[nodes[i]] = static_cast<std::uint32_t>(i);
    BipartiteGraph bg;
    bg.adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i) bg.labels.push_back(graph.factor(nodes[i]).id);
    for (const auto& link : graph.influences()) {
      auto s = local.find(*graph.index_of(link.source));
      if (s == local.end()) continue;
      bg.adjacency[s->second].push_back(local.at(*graph.index_of(link.target)));
    }

    const auto matchable = matchable_bottom_sets(bg);
    const std::set<std::uint32_t> covered(matchable.begin(), matchable.end());
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);

    std::vector<std::vector<FactorId>> found;
    for (std::size_t k = 1; k <= n && found.empty(); ++k) {
      for (std::uint32_t subset = 0; subset <= full; ++subset) {
        if (static_cast<std::size_t>(std::popcount(subset)) != k) continue;
        if (!covered.contains(full & ~subset)) continue;
        std::vector<FactorId> members;
        for (std::size_t i = 0; i < n; ++i) {
          if (subset >> i & 1u) members.push_back(bg.labels[i]);
        }
        found.push_back(std::move(members));
      }
    }
    per_component.push_back(std::move(found));
  }

  std::vector<std::vector<FactorId>> combined{{}};
  for (const auto& options : per_component) {
    std::vector<std::vector<FactorId>> next;
    for (const auto& prefix : combined) {
      for (const auto& part : options) {
        auto merged = prefix;
        merged.insert(merged.end(), part.begin(), part.end());
        std::ranges::sort(merged);
        next.push_back(std::move(merged));
      }
    }
    combined = std::move(next);
  }
  std::ranges::sort(combined);
  return combined;
}

FcmGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> three(0, 2);
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "f%02zu", i);
    factors.push_back({id, std::string("Factor ") + id,
                       static_cast<Controllability>(three(rng)), false});
  }
  std::vector<Influence> links;
  for (std::size_t s = 0; s < spec.nodes; ++s) {
    for (std::size_t t = 0; t < spec.nodes; ++t) {
      if (s == t && !spec.self_loops) continue;
      if (coin(rng) < spec.edge_probability) {
        links.push_back({factors[s].id, factors[t].id, static_cast<Sign>(three(rng)),
                         static_cast<Strength>(three(rng))});
      }
    }
  }
  return FcmGraph(std::move(factors), std::move(links));
}

double sigmoid_fixed_point_bisection(double weight, double lambda) {
  auto residual = [&](double t) { return 1.0 / (1.0 + std::exp(-lambda * weight * t)) - t; };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace levers::testing
