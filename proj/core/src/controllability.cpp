#include "levers/controllability.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "levers/errors.hpp"
#include "levers/matching.hpp"

namespace levers {

namespace {

enum class NodeClass : std::uint8_t { Sometimes, Always, Never };

using IndexSet = std::vector<std::size_t>;
using Clock = std::chrono::steady_clock;

void require_no_self_loops(const FcmGraph& graph) {
  if (auto loops = detect_self_loops(graph); !loops.empty()) {
    throw SelfLoopError(std::move(loops));
  }
}

/// One weakly connected component in local indexing. Local index i refers to
/// global factor index `nodes[i]`; both orders are ascending by factor id.
struct Component {
  IndexSet nodes;
  BipartiteGraph bipartite;
  std::vector<IndexSet> predecessors;
  std::size_t matching_size = 0;
  std::vector<NodeClass> classes;

  std::size_t size() const noexcept { return nodes.size(); }
  bool perfectly_matched() const noexcept { return matching_size == size(); }
  std::size_t configuration_size() const noexcept {
    return perfectly_matched() ? 1 : size() - matching_size;
  }
};

Component make_component(const FcmGraph& graph, IndexSet nodes) {
  Component c;
  c.nodes = std::move(nodes);
  std::vector<std::size_t> local(graph.size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) local[c.nodes[i]] = i;

  c.bipartite.labels.reserve(c.size());
  c.bipartite.adjacency.resize(c.size());
  c.predecessors.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.bipartite.labels.push_back(graph.factor(c.nodes[i]).id);
    for (auto v : graph.successors()[c.nodes[i]]) {
      c.bipartite.adjacency[i].push_back(static_cast<std::uint32_t>(local[v]));
      c.predecessors[local[v]].push_back(i);
    }
  }
  return c;
}

/// Fills matching_size and classes.
///
/// Never: forcing i unmatched (dropping its in-links) shrinks the maximum
/// matching. Always: no in-link j -> i can sit in a maximum matching, i.e.
/// dropping j's other out-links and i's in-links never leaves m - 1.
/// A perfectly matched component has every singleton as a configuration,
/// so all of its nodes are reported as sometimes.
void classify(Component& c) {
  const auto n = c.size();
  HopcroftKarp solver(c.bipartite);
  c.matching_size = solver.solve();
  c.classes.assign(n, NodeClass::Sometimes);
  if (c.perfectly_matched()) return;

  const auto m = c.matching_size;
  const auto base = solver.top_of_bottom();
  std::vector<std::uint8_t> tops(n, 0), bottoms(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    // Unmatched in some maximum matching already.
    if (base[i] == kUnmatched) continue;
    bottoms[i] = 1;
    if (solver.solve({}, bottoms) < m) c.classes[i] = NodeClass::Never;
    bottoms[i] = 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (c.classes[i] == NodeClass::Never) continue;
    // Matched in some maximum matching already.
    if (base[i] != kUnmatched) continue;
    bool always = true;
    bottoms[i] = 1;
    for (auto j : c.predecessors[i]) {
      tops[j] = 1;
      const bool edge_usable = solver.solve(tops, bottoms) == m - 1;
      tops[j] = 0;
      if (edge_usable) {
        always = false;
        break;
      }
    }
    bottoms[i] = 0;
    if (always) c.classes[i] = NodeClass::Always;
  }
}

enum class StopReason { None, MaxConfigs, MaxTime, Cancelled };

struct SearchControl {
  Clock::time_point deadline;
  const EnumerationOptions* options;
  std::atomic<std::size_t> tested{0};
  std::atomic<int> stop{static_cast<int>(StopReason::None)};

  void halt(StopReason reason) {
    int expected = static_cast<int>(StopReason::None);
    stop.compare_exchange_strong(expected, static_cast<int>(reason));
  }
  bool halted() const { return stop.load() != static_cast<int>(StopReason::None); }

  /// Records one forcing test; returns false once the search must end.
  bool tick() {
    const auto count = tested.fetch_add(1) + 1;
    if (options->on_progress && count % 1024 == 0) options->on_progress(count);
    if (options->cancellation.cancelled()) halt(StopReason::Cancelled);
    if ((count & 63) == 0 && Clock::now() >= deadline) halt(StopReason::MaxTime);
    return !halted();
  }
};

/// Lexicographic search over choices of `pick` nodes from `pool` such that
/// forcing them unmatched keeps the maximum matching at m. A chosen prefix
/// that already breaks the matching cannot be repaired by adding nodes, so
/// its whole subtree is skipped.
class ForcingSearch {
 public:
  ForcingSearch(const Component& c, const IndexSet& pool, std::size_t pick,
                std::size_t cap, SearchControl& control)
      : c_(c), pool_(pool), pick_(pick), cap_(cap), control_(control),
        solver_(c.bipartite), bottoms_(c.size(), 0) {}

  /// Explores choices whose first element is pool[first].
  std::vector<IndexSet> branch(std::size_t first) {
    found_.clear();
    chosen_.clear();
    if (force(first)) descend(first + 1);
    return std::move(found_);
  }

 private:
  bool force(std::size_t slot) {
    if (!control_.tick()) return false;
    const auto node = pool_[slot];
    bottoms_[node] = 1;
    if (solver_.solve({}, bottoms_) == c_.matching_size) {
      chosen_.push_back(node);
      return true;
    }
    bottoms_[node] = 0;
    return false;
  }

  void release() {
    bottoms_[chosen_.back()] = 0;
    chosen_.pop_back();
  }

  void descend(std::size_t next) {
    if (chosen_.size() == pick_) {
      found_.push_back(chosen_);
      release();
      return;
    }
    const auto remaining = pick_ - chosen_.size();
    for (std::size_t s = next; s + remaining <= pool_.size(); ++s) {
      if (found_.size() > cap_ || control_.halted()) break;
      if (force(s)) descend(s + 1);
    }
    release();
  }

  const Component& c_;
  const IndexSet& pool_;
  std::size_t pick_;
  std::size_t cap_;
  SearchControl& control_;
  HopcroftKarp solver_;
  std::vector<std::uint8_t> bottoms_;
  IndexSet chosen_;
  std::vector<IndexSet> found_;
};

unsigned worker_count(const EnumerationOptions& options, std::size_t tasks) {
  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
}

/// Configurations of one component as sorted local index sets, at most
/// cap + 1 of them (the extra one signals truncation).
std::vector<IndexSet> enumerate_component(const Component& c, std::size_t cap,
                                          SearchControl& control) {
  std::vector<IndexSet> out;
  if (c.perfectly_matched()) {
    for (std::size_t i = 0; i < c.size() && out.size() <= cap; ++i) {
      out.push_back({i});
    }
    return out;
  }

  IndexSet always, pool;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.classes[i] == NodeClass::Always) always.push_back(i);
    if (c.classes[i] == NodeClass::Sometimes) pool.push_back(i);
  }
  const auto deficiency = c.size() - c.matching_size;
  if (always.size() > deficiency) return out;
  const auto pick = deficiency - always.size();

  auto with_always = [&](const IndexSet& chosen) {
    IndexSet members = always;
    members.insert(members.end(), chosen.begin(), chosen.end());
    std::ranges::sort(members);
    return members;
  };

  if (pick == 0) {
    out.push_back(always);
    return out;
  }
  if (pool.size() < pick) return out;

  // Top-level branches are independent; results are merged in branch order
  // so the output does not depend on scheduling.
  const auto branches = pool.size() - pick + 1;
  std::vector<std::vector<IndexSet>> per_branch(branches);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    ForcingSearch search(c, pool, pick, cap, control);
    for (auto b = next.fetch_add(1); b < branches && !control.halted();
         b = next.fetch_add(1)) {
      per_branch[b] = search.branch(b);
    }
  };
  const auto workers = worker_count(*control.options, branches);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool_threads;
    for (unsigned w = 0; w < workers; ++w) pool_threads.emplace_back(work);
  }

  for (auto& found : per_branch) {
    for (auto& chosen : found) {
      if (out.size() > cap) break;
      out.push_back(with_always(chosen));
    }
  }
  return out;
}

IndexSet reachable_from(const FcmGraph& graph, const IndexSet& sources) {
  std::vector<std::uint8_t> seen(graph.size(), 0);
  std::deque<std::size_t> queue;
  for (auto s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto v : graph.successors()[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  IndexSet unreached;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (!seen[i]) unreached.push_back(i);
  }
  return unreached;
}

std::vector<FactorId> ids_of(const FcmGraph& graph, const IndexSet& indices) {
  std::vector<FactorId> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(graph.factor(i).id);
  return out;
}

std::optional<IndexSet> indices_of(const FcmGraph& graph,
                                   const std::vector<FactorId>& ids) {
  IndexSet out;
  for (const auto& id : ids) {
    auto index = graph.index_of(id);
    if (!index) return std::nullopt;
    out.push_back(*index);
  }
  std::ranges::sort(out);
  if (std::ranges::adjacent_find(out) != out.end()) return std::nullopt;
  return out;
}

std::vector<Component> build_components(const FcmGraph& graph) {
  std::vector<Component> components;
  for (auto& nodes : component_indices(graph)) {
    components.push_back(make_component(graph, std::move(nodes)));
    classify(components.back());
  }
  return components;
}

NodeClassification classification_of(const FcmGraph& graph,
                                      const std::vector<Component>& components) {
  std::vector<NodeClass> global(graph.size(), NodeClass::Sometimes);
  for (const auto& c : components) {
    for (std::size_t i = 0; i < c.size(); ++i) global[c.nodes[i]] = c.classes[i];
  }
  NodeClassification out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& id = graph.factor(i).id;
    switch (global[i]) {
      case NodeClass::Always: out.always.push_back(id); break;
      case NodeClass::Never: out.never.push_back(id); break;
      case NodeClass::Sometimes: out.sometimes.push_back(id); break;
    }
  }
  return out;
}

}  // namespace

NodeClassification classify_nodes(const FcmGraph& graph) {
  require_no_self_loops(graph);
  return classification_of(graph, build_components(graph));
}

AnalysisReport enumerate_configurations(const FcmGraph& graph,
                                        const EnumerationOptions& options) {
  require_no_self_loops(graph);

  AnalysisReport report;
  report.graph = std::make_shared<const FcmGraph>(graph);
  report.neutral_influences = graph.neutral_influences();
  report.defaulted_controllability = graph.defaulted_controllability();

  const auto components = build_components(graph);
  report.classification = classification_of(graph, components);

  SearchControl control;
  control.options = &options;
  control.deadline = Clock::now() + options.budget.max_time;
  const auto cap = options.budget.max_configs;

  std::vector<std::vector<IndexSet>> per_component;
  bool overflow = false;
  for (const auto& c : components) {
    auto local = enumerate_component(c, cap, control);
    if (local.size() > cap) overflow = true;

    ComponentSummary summary;
    summary.factors = ids_of(graph, c.nodes);
    summary.matching_size = c.matching_size;
    summary.configuration_size = c.configuration_size();
    summary.configuration_count = std::min(local.size(), cap);
    report.components.push_back(std::move(summary));
    report.matching_size += c.matching_size;
    report.configuration_size += c.configuration_size();

    std::vector<IndexSet> global;
    for (auto& members : local) {
      IndexSet mapped;
      for (auto i : members) mapped.push_back(c.nodes[i]);
      global.push_back(std::move(mapped));
    }
    if (global.size() > cap) global.resize(cap);
    per_component.push_back(std::move(global));
  }

  // Cartesian product in odometer order, capped.
  std::vector<IndexSet> combined;
  const bool any_empty = std::ranges::any_of(
      per_component, [](const auto& list) { return list.empty(); });
  if (!any_empty) {
    std::vector<std::size_t> digit(per_component.size(), 0);
    for (bool done = false; !done;) {
      if (combined.size() == cap) {
        overflow = true;
        break;
      }
      IndexSet members;
      for (std::size_t k = 0; k < per_component.size(); ++k) {
        const auto& part = per_component[k][digit[k]];
        members.insert(members.end(), part.begin(), part.end());
      }
      std::ranges::sort(members);
      combined.push_back(std::move(members));

      done = true;
      for (auto k = per_component.size(); k-- > 0;) {
        if (++digit[k] < per_component[k].size()) {
          done = false;
          break;
        }
        digit[k] = 0;
      }
    }
  }
  std::ranges::sort(combined);

  for (const auto& f : graph.factors()) report.frequencies[f.id] = 0;
  for (const auto& members : combined) {
    ControlConfiguration config;
    config.members = ids_of(graph, members);
    config.warnings = ids_of(graph, reachable_from(graph, members));
    for (const auto& id : config.members) ++report.frequencies[id];
    report.configurations.push_back(std::move(config));
  }

  report.candidates_tested = control.tested.load();
  if (options.on_progress) options.on_progress(report.candidates_tested);
  switch (static_cast<StopReason>(control.stop.load())) {
    case StopReason::Cancelled: report.truncation_reason = "cancelled"; break;
    case StopReason::MaxTime: report.truncation_reason = "max_time"; break;
    default:
      if (overflow) report.truncation_reason = "max_configs";
      break;
  }
  report.truncated = !report.truncation_reason.empty();
  return report;
}

bool is_configuration(const FcmGraph& graph,
                      const std::vector<FactorId>& candidate) {
  require_no_self_loops(graph);
  auto chosen = indices_of(graph, candidate);
  if (!chosen) return false;

  std::vector<std::uint8_t> in_candidate(graph.size(), 0);
  for (auto i : *chosen) in_candidate[i] = 1;

  for (auto& nodes : component_indices(graph)) {
    auto c = make_component(graph, std::move(nodes));
    HopcroftKarp solver(c.bipartite);
    c.matching_size = solver.solve();

    std::vector<std::uint8_t> bottoms(c.size(), 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (in_candidate[c.nodes[i]]) {
        bottoms[i] = 1;
        ++count;
      }
    }
    if (count != c.configuration_size()) return false;
    if (c.perfectly_matched()) continue;
    if (solver.solve({}, bottoms) != c.matching_size) return false;
  }
  return true;
}

std::vector<FactorId> reachability_warnings(const FcmGraph& graph,
                                            const std::vector<FactorId>& config) {
  IndexSet sources;
  for (const auto& id : config) {
    if (auto index = graph.index_of(id)) sources.push_back(*index);
  }
  return ids_of(graph, reachable_from(graph, sources));
}

std::size_t structural_controllability_rank(
    const FcmGraph& graph, const std::vector<FactorId>& config) {
  if (config.empty()) throw InvalidArgument("configuration is empty");
  auto inputs = indices_of(graph, config);
  if (!inputs) {
    throw InvalidArgument("configuration names unknown or repeated factors");
  }

  const auto n = static_cast<Eigen::Index>(graph.size());
  const auto m = static_cast<Eigen::Index>(inputs->size());
  constexpr int kSamples = 3;
  constexpr double kTolerance = 1e-9;

  std::mt19937_64 rng(0x5eedc0de);
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);

  std::size_t best = 0;
  for (int sample = 0; sample < kSamples; ++sample) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& link : graph.influences()) {
      const double sign = weight_of(link) < 0 ? -1.0 : 1.0;
      a(static_cast<Eigen::Index>(*graph.index_of(link.target)),
        static_cast<Eigen::Index>(*graph.index_of(link.source))) =
          sign * magnitude(rng);
    }
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      block(static_cast<Eigen::Index>((*inputs)[k]), k) = magnitude(rng);
    }

    // Kalman matrix with unit-norm columns; column scaling leaves the rank
    // unchanged and keeps the powers of A from swamping the tolerance.
    Eigen::MatrixXd kalman(n, n * m);
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index k = 0; k < m; ++k) {
        const double norm = block.col(k).norm();
        if (norm > 0) block.col(k) /= norm;
      }
      kalman.middleCols(p * m, m) = block;
      block = a * block;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(kalman);
    const auto& sigma = svd.singularValues();
    std::size_t rank = 0;
    if (sigma.size() > 0 && sigma(0) > 0) {
      for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > kTolerance * sigma(0)) ++rank;
      }
    }
    best = std::max(best, rank);
  }
  return best;
}

}  // namespace levers
