#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace levers {

using FactorId = std::string;

/// Stakeholder-rated ease of steering a factor (traffic-light scale).
enum class Controllability { Easy, Medium, Hard };

enum class Sign { Positive, Negative, Neutral };

enum class Strength { Weak, Medium, Strong };

std::string_view to_string(Controllability level);
std::string_view to_string(Sign sign);
std::string_view to_string(Strength strength);

std::optional<Controllability> parse_controllability(std::string_view text);
std::optional<Sign> parse_sign(std::string_view text);
std::optional<Strength> parse_strength(std::string_view text);

struct Factor {
  FactorId id;
  std::string name;
  Controllability controllability = Controllability::Medium;
  // Set when the input omitted a rating and Medium was filled in.
  bool controllability_defaulted = false;

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct Influence {
  FactorId source;
  FactorId target;
  Sign sign = Sign::Positive;
  Strength strength = Strength::Medium;

  friend bool operator==(const Influence&, const Influence&) = default;
};

struct GraphMetadata {
  std::string title;
  std::string scenario;
  std::string perspective;
  std::string schema_version = "1";
  // Client-owned keys (e.g. layout positions), each kept as compact JSON text
  // so they round-trip untouched.
  std::map<std::string, std::string> extras;

  friend bool operator==(const GraphMetadata&, const GraphMetadata&) = default;
};

/// One stakeholder group's controllability ratings, applied on top of the
/// graph's own labels.
struct Perspective {
  std::string label;
  std::map<FactorId, Controllability> overrides;

  friend bool operator==(const Perspective&, const Perspective&) = default;
};

/// Signed weight of a link: +/-{0.2, 0.5, 0.7} for Weak/Medium/Strong.
/// Neutral links count as positive; FcmGraph::neutral_influences() flags them.
double weight_of(const Influence& influence);

/// A fuzzy cognitive map. Immutable once constructed; factors are kept
/// sorted by id and that order defines every index used by the analyses.
class FcmGraph {
 public:
  /// Validates and normalizes. Throws SchemaError on duplicate ids, empty
  /// names, dangling endpoints, duplicate (source, target) pairs, unknown
  /// perspective ids, or an empty factor set.
  FcmGraph(std::vector<Factor> factors, std::vector<Influence> influences,
           GraphMetadata metadata = {},
           std::vector<Perspective> perspectives = {});

  std::size_t size() const noexcept { return factors_.size(); }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  /// Sorted by (source, target).
  const std::vector<Influence>& influences() const noexcept {
    return influences_;
  }
  const GraphMetadata& metadata() const noexcept { return metadata_; }
  const std::vector<Perspective>& perspectives() const noexcept {
    return perspectives_;
  }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const Factor& factor(std::size_t index) const { return factors_.at(index); }
  const Factor* find_factor(std::string_view id) const;
  const Perspective* find_perspective(std::string_view label) const;

  /// Out-neighbour indices per factor, ascending.
  const std::vector<std::vector<std::size_t>>& successors() const noexcept {
    return successors_;
  }
  /// In-neighbour indices per factor, ascending.
  const std::vector<std::vector<std::size_t>>& predecessors() const noexcept {
    return predecessors_;
  }

  /// "source->target" for every Neutral link.
  std::vector<std::string> neutral_influences() const;
  std::vector<FactorId> defaulted_controllability() const;

  /// Factor id -> label after applying `perspective` (or the graph's own).
  std::map<FactorId, Controllability> labeling(
      const Perspective* perspective = nullptr) const;

  /// Copy with perspective overrides folded into the factor labels.
  FcmGraph with_perspective(const Perspective& perspective) const;

  /// Induced subgraph on the given factor indices. Perspectives are dropped.
  FcmGraph subgraph(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const FcmGraph& a, const FcmGraph& b) {
    return a.factors_ == b.factors_ && a.influences_ == b.influences_ &&
           a.metadata_ == b.metadata_ && a.perspectives_ == b.perspectives_;
  }

 private:
  std::vector<Factor> factors_;
  std::vector<Influence> influences_;
  GraphMetadata metadata_;
  std::vector<Perspective> perspectives_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<std::vector<std::size_t>> predecessors_;
};

/// Dense weighted transposed adjacency: entry (i, j) is the weight of the
/// link j -> i. Rows and columns follow the graph's sorted factor order.
class WeightMatrix {
 public:
  explicit WeightMatrix(std::vector<FactorId> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<FactorId>& ids() const noexcept { return ids_; }

  double operator()(std::size_t row, std::size_t col) const {
    return data_[row * ids_.size() + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return data_[row * ids_.size() + col];
  }

  std::size_t nonzero_count() const;

 private:
  std::vector<FactorId> ids_;
  std::vector<double> data_;
};

WeightMatrix adjacency_matrix(const FcmGraph& graph);

/// Maximal weakly connected subgraphs, ordered by their smallest factor id.
std::vector<FcmGraph> weakly_connected_components(const FcmGraph& graph);

/// Index form of the above: groups of factor indices, each ascending.
std::vector<std::vector<std::size_t>> component_indices(const FcmGraph& graph);

/// Ids of factors with a link to themselves, sorted.
std::vector<FactorId> detect_self_loops(const FcmGraph& graph);

}  // namespace levers
