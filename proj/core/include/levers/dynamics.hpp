#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "levers/fcm.hpp"

namespace levers {

/// Activation of every factor at one step. `ids` and `values` are parallel
/// and follow the graph's sorted factor order.
struct StateVector {
  std::vector<FactorId> ids;
  std::vector<double> values;
  std::size_t step = 0;

  double at(std::string_view id) const;
};

enum class MappingKind { Linear, Sigmoid };

struct MappingSpec {
  MappingKind kind = MappingKind::Sigmoid;
  double lambda = 1.0;  // sigmoid steepness, > 0
};

struct Trajectory {
  std::vector<StateVector> states;
  bool converged = false;
  std::optional<StateVector> fixed_point;
};

struct IterationOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 10'000;
  // Defaults to 0.5 everywhere for Sigmoid and 1.0 for Linear.
  std::optional<std::vector<double>> initial;
};

/// One application of x' = f(A x). Sigmoid: 1 / (1 + exp(-lambda * Ax)).
/// Linear: Ax scaled down by max(1, max |Ax|).
StateVector step(const StateVector& state, const WeightMatrix& matrix,
                 const MappingSpec& mapping);

/// Iterates until consecutive states differ by less than the tolerance in
/// max-norm. Throws NonFiniteError if a state overflows and InvalidArgument
/// on a non-positive tolerance, lambda or a mis-sized initial state.
Trajectory iterate_to_fixed_point(const FcmGraph& graph,
                                  const MappingSpec& mapping,
                                  const IterationOptions& options = {});

/// Factor ids by descending value, ties broken by id.
std::vector<FactorId> rank_factors(const StateVector& state);

struct ConsistencyRanking {
  std::vector<FactorId> top;
  std::vector<FactorId> bottom;
  // Set when every factor settles to the same value under both mappings.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Factors in the top-k (and bottom-k) of both the linear and the sigmoid
/// fixed-point rankings. A mapping that does not converge contributes an
/// empty set and a warning. Throws InvalidArgument unless 1 <= k <= N.
ConsistencyRanking consistency_ranking(const FcmGraph& graph, std::size_t k,
                                       const IterationOptions& options = {});

}  // namespace levers
