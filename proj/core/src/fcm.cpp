#include "levers/fcm.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "levers/errors.hpp"

namespace levers {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text,
                           const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

constexpr std::pair<std::string_view, Controllability> kControllability[] = {
    {"Easy", Controllability::Easy},
    {"Medium", Controllability::Medium},
    {"Hard", Controllability::Hard}};

constexpr std::pair<std::string_view, Sign> kSign[] = {
    {"Positive", Sign::Positive},
    {"Negative", Sign::Negative},
    {"Neutral", Sign::Neutral}};

constexpr std::pair<std::string_view, Strength> kStrength[] = {
    {"Weak", Strength::Weak},
    {"Medium", Strength::Medium},
    {"Strong", Strength::Strong}};

}  // namespace

SelfLoopError::SelfLoopError(std::vector<std::string> ids)
    : Error([&] {
        std::string message = "self-loops present on:";
        for (const auto& id : ids) message += " " + id;
        return message;
      }()),
      ids_(std::move(ids)) {}

std::string_view to_string(Controllability level) {
  return kControllability[static_cast<int>(level)].first;
}
std::string_view to_string(Sign sign) {
  return kSign[static_cast<int>(sign)].first;
}
std::string_view to_string(Strength strength) {
  return kStrength[static_cast<int>(strength)].first;
}

std::optional<Controllability> parse_controllability(std::string_view text) {
  return lookup(text, kControllability);
}
std::optional<Sign> parse_sign(std::string_view text) {
  return lookup(text, kSign);
}
std::optional<Strength> parse_strength(std::string_view text) {
  return lookup(text, kStrength);
}

double weight_of(const Influence& influence) {
  double magnitude = 0.5;
  switch (influence.strength) {
    case Strength::Weak: magnitude = 0.2; break;
    case Strength::Medium: magnitude = 0.5; break;
    case Strength::Strong: magnitude = 0.7; break;
  }
  return influence.sign == Sign::Negative ? -magnitude : magnitude;
}

FcmGraph::FcmGraph(std::vector<Factor> factors,
                   std::vector<Influence> influences, GraphMetadata metadata,
                   std::vector<Perspective> perspectives)
    : factors_(std::move(factors)),
      influences_(std::move(influences)),
      metadata_(std::move(metadata)),
      perspectives_(std::move(perspectives)) {
  if (factors_.empty()) throw SchemaError("factors", "graph has no factors");

  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto path = "factors[" + std::to_string(i) + "]";
    if (factors_[i].id.empty()) throw SchemaError(path + ".id", "empty id");
    if (factors_[i].name.empty()) {
      throw SchemaError(path + ".name",
                        "factor \"" + factors_[i].id + "\" has an empty name");
    }
    if (!seen.insert(factors_[i].id).second) {
      throw SchemaError(path + ".id", "duplicate factor id \"" +
                                          factors_[i].id + "\"");
    }
  }
  std::ranges::sort(factors_, {}, &Factor::id);

  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (std::size_t i = 0; i < influences_.size(); ++i) {
    const auto& link = influences_[i];
    const auto path = "influences[" + std::to_string(i) + "]";
    if (!find_factor(link.source)) {
      throw SchemaError(path + ".source",
                        "unknown factor id \"" + link.source + "\"");
    }
    if (!find_factor(link.target)) {
      throw SchemaError(path + ".target",
                        "unknown factor id \"" + link.target + "\"");
    }
    if (!pairs.emplace(link.source, link.target).second) {
      throw SchemaError(path, "duplicate influence " + link.source + "->" +
                                  link.target);
    }
  }
  std::ranges::sort(influences_, [](const Influence& a, const Influence& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });

  std::set<std::string_view> labels;
  for (std::size_t p = 0; p < perspectives_.size(); ++p) {
    const auto path = "perspectives[" + std::to_string(p) + "]";
    if (!labels.insert(perspectives_[p].label).second) {
      throw SchemaError(path + ".label", "duplicate perspective label \"" +
                                             perspectives_[p].label + "\"");
    }
    for (const auto& [id, level] : perspectives_[p].overrides) {
      if (!find_factor(id)) {
        throw SchemaError(path + ".overrides." + id,
                          "unknown factor id \"" + id + "\"");
      }
    }
  }

  successors_.resize(factors_.size());
  predecessors_.resize(factors_.size());
  for (const auto& link : influences_) {
    const auto s = *index_of(link.source);
    const auto t = *index_of(link.target);
    successors_[s].push_back(t);
    predecessors_[t].push_back(s);
  }
  for (auto& list : predecessors_) std::ranges::sort(list);
}

std::optional<std::size_t> FcmGraph::index_of(std::string_view id) const {
  auto it = std::ranges::lower_bound(factors_, id, {}, &Factor::id);
  if (it == factors_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - factors_.begin());
}

const Factor* FcmGraph::find_factor(std::string_view id) const {
  auto index = index_of(id);
  return index ? &factors_[*index] : nullptr;
}

const Perspective* FcmGraph::find_perspective(std::string_view label) const {
  auto it = std::ranges::find(perspectives_, label, &Perspective::label);
  return it == perspectives_.end() ? nullptr : &*it;
}

std::vector<std::string> FcmGraph::neutral_influences() const {
  std::vector<std::string> out;
  for (const auto& link : influences_) {
    if (link.sign == Sign::Neutral) out.push_back(link.source + "->" + link.target);
  }
  return out;
}

std::vector<FactorId> FcmGraph::defaulted_controllability() const {
  std::vector<FactorId> out;
  for (const auto& f : factors_) {
    if (f.controllability_defaulted) out.push_back(f.id);
  }
  return out;
}

std::map<FactorId, Controllability> FcmGraph::labeling(
    const Perspective* perspective) const {
  std::map<FactorId, Controllability> out;
  for (const auto& f : factors_) out.emplace(f.id, f.controllability);
  if (perspective) {
    for (const auto& [id, level] : perspective->overrides) {
      if (auto it = out.find(id); it != out.end()) it->second = level;
    }
  }
  return out;
}

FcmGraph FcmGraph::with_perspective(const Perspective& perspective) const {
  for (const auto& [id, level] : perspective.overrides) {
    if (!find_factor(id)) {
      throw SchemaError("overrides." + id, "unknown factor \"" + id + "\"");
    }
  }
  auto factors = factors_;
  for (auto& f : factors) {
    if (auto it = perspective.overrides.find(f.id);
        it != perspective.overrides.end()) {
      f.controllability = it->second;
      f.controllability_defaulted = false;
    }
  }
  auto metadata = metadata_;
  metadata.perspective = perspective.label;
  return FcmGraph(std::move(factors), influences_, std::move(metadata),
                  perspectives_);
}

FcmGraph FcmGraph::subgraph(const std::vector<std::size_t>& indices) const {
  std::vector<Factor> factors;
  std::set<std::string_view> keep;
  for (auto i : indices) {
    factors.push_back(factors_.at(i));
    keep.insert(factors_[i].id);
  }
  std::vector<Influence> links;
  for (const auto& link : influences_) {
    if (keep.contains(link.source) && keep.contains(link.target)) {
      links.push_back(link);
    }
  }
  return FcmGraph(std::move(factors), std::move(links), metadata_);
}

WeightMatrix::WeightMatrix(std::vector<FactorId> ids)
    : ids_(std::move(ids)), data_(ids_.size() * ids_.size(), 0.0) {}

std::size_t WeightMatrix::nonzero_count() const {
  return static_cast<std::size_t>(
      std::ranges::count_if(data_, [](double v) { return v != 0.0; }));
}

WeightMatrix adjacency_matrix(const FcmGraph& graph) {
  std::vector<FactorId> ids;
  ids.reserve(graph.size());
  for (const auto& f : graph.factors()) ids.push_back(f.id);
  WeightMatrix matrix(std::move(ids));
  for (const auto& link : graph.influences()) {
    matrix(*graph.index_of(link.target), *graph.index_of(link.source)) =
        weight_of(link);
  }
  return matrix;
}

std::vector<std::vector<std::size_t>> component_indices(const FcmGraph& graph) {
  const auto n = graph.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t u = 0; u < n; ++u) {
    for (auto v : graph.successors()[u]) {
      auto a = find(u), b = find(v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Roots are the smallest index in each set, so grouping by root in index
  // order yields components ordered by smallest factor id.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto root = find(i);
    if (slot[root] == n) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

std::vector<FcmGraph> weakly_connected_components(const FcmGraph& graph) {
  std::vector<FcmGraph> out;
  for (const auto& group : component_indices(graph)) {
    out.push_back(graph.subgraph(group));
  }
  return out;
}

std::vector<FactorId> detect_self_loops(const FcmGraph& graph) {
  std::vector<FactorId> out;
  for (const auto& link : graph.influences()) {
    if (link.source == link.target) out.push_back(link.source);
  }
  std::ranges::sort(out);
  return out;
}

}  // namespace levers
