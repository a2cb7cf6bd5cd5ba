#include "levers/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "levers/errors.hpp"

namespace levers {

double StateVector::at(std::string_view id) const {
  auto it = std::ranges::find(ids, id);
  if (it == ids.end()) throw InvalidArgument("no factor \"" + std::string(id) + "\"");
  return values[static_cast<std::size_t>(it - ids.begin())];
}

StateVector step(const StateVector& state, const WeightMatrix& matrix,
                 const MappingSpec& mapping) {
  const auto n = matrix.size();
  if (state.values.size() != n) {
    throw InvalidArgument("state has " + std::to_string(state.values.size()) +
                          " entries, matrix has " + std::to_string(n));
  }
  StateVector next{matrix.ids(), std::vector<double>(n, 0.0), state.step + 1};
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += matrix(i, j) * state.values[j];
    next.values[i] = sum;
  }

  if (mapping.kind == MappingKind::Sigmoid) {
    for (auto& v : next.values) v = 1.0 / (1.0 + std::exp(-mapping.lambda * v));
  } else {
    double largest = 1.0;
    for (auto v : next.values) largest = std::max(largest, std::abs(v));
    for (auto& v : next.values) v /= largest;
  }
  return next;
}

Trajectory iterate_to_fixed_point(const FcmGraph& graph,
                                  const MappingSpec& mapping,
                                  const IterationOptions& options) {
  if (!(options.tolerance > 0)) throw InvalidArgument("tolerance must be > 0");
  if (mapping.kind == MappingKind::Sigmoid && !(mapping.lambda > 0)) {
    throw InvalidArgument("lambda must be > 0");
  }

  const auto matrix = adjacency_matrix(graph);
  const auto n = matrix.size();
  StateVector state{matrix.ids(), {}, 0};
  if (options.initial) {
    if (options.initial->size() != n) {
      throw InvalidArgument("initial state needs " + std::to_string(n) +
                            " entries");
    }
    state.values = *options.initial;
  } else {
    state.values.assign(n, mapping.kind == MappingKind::Sigmoid ? 0.5 : 1.0);
  }
  if (!std::ranges::all_of(state.values, [](double v) { return std::isfinite(v); })) {
    throw NonFiniteError(0);
  }

  auto advance = [&](const StateVector& from, double& delta) {
    auto next = step(from, matrix, mapping);
    if (!std::ranges::all_of(next.values, [](double v) { return std::isfinite(v); })) {
      throw NonFiniteError(next.step);
    }
    delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta = std::max(delta, std::abs(next.values[i] - from.values[i]));
    }
    return next;
  };

  Trajectory out;
  out.states.push_back(state);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double delta = 0.0;
    out.states.push_back(advance(out.states.back(), delta));
    if (delta >= options.tolerance) continue;
    // A small move is only accepted once the reported state itself stays put
    // under one more step; the probe is not recorded.
    double settle = 0.0;
    advance(out.states.back(), settle);
    if (settle < options.tolerance) {
      out.converged = true;
      out.fixed_point = out.states.back();
      break;
    }
  }
  return out;
}

std::vector<FactorId> rank_factors(const StateVector& state) {
  std::vector<std::size_t> order(state.ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    if (state.values[a] != state.values[b]) return state.values[a] > state.values[b];
    return state.ids[a] < state.ids[b];
  });
  std::vector<FactorId> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(state.ids[i]);
  return out;
}

ConsistencyRanking consistency_ranking(const FcmGraph& graph, std::size_t k,
                                       const IterationOptions& options) {
  if (k < 1 || k > graph.size()) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(graph.size()) + "]");
  }

  ConsistencyRanking out;
  std::vector<std::vector<FactorId>> rankings;
  bool all_flat = true;
  for (auto kind : {MappingKind::Linear, MappingKind::Sigmoid}) {
    IterationOptions run = options;
    run.initial.reset();
    auto trajectory = iterate_to_fixed_point(graph, {kind, 1.0}, run);
    const char* name = kind == MappingKind::Linear ? "linear" : "sigmoid";
    if (!trajectory.converged) {
      out.warnings.push_back(std::string(name) + " mapping did not converge");
      rankings.emplace_back();
      continue;
    }
    const auto& values = trajectory.fixed_point->values;
    if (std::ranges::adjacent_find(values, std::ranges::not_equal_to{}) != values.end()) {
      all_flat = false;
    }
    rankings.push_back(rank_factors(*trajectory.fixed_point));
  }

  auto intersect = [&](bool from_top) {
    std::vector<FactorId> result;
    if (rankings[0].empty() || rankings[1].empty()) return result;
    auto slice = [&](const std::vector<FactorId>& r) {
      return from_top ? std::set<FactorId>(r.begin(), r.begin() + static_cast<long>(k))
                      : std::set<FactorId>(r.end() - static_cast<long>(k), r.end());
    };
    const auto a = slice(rankings[0]);
    const auto b = slice(rankings[1]);
    std::ranges::set_intersection(a, b, std::back_inserter(result));
    return result;
  };
  out.top = intersect(true);
  out.bottom = intersect(false);
  if (!rankings[0].empty() && !rankings[1].empty() && all_flat) {
    out.degenerate = true;
    out.warnings.push_back("all factors settle to equal values; ranking is by id only");
  }
  return out;
}

}  // namespace levers
