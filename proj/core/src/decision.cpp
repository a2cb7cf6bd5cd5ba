#include "levers/decision.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <tuple>

#include "levers/errors.hpp"

namespace levers {

double ControllabilityScale::operator()(Controllability level) const {
  switch (level) {
    case Controllability::Easy: return easy;
    case Controllability::Medium: return medium;
    case Controllability::Hard: return hard;
  }
  return medium;
}

void ControllabilityScale::validate() const {
  if (!(easy < medium && medium < hard)) {
    throw InvalidArgument("controllability scale must be strictly increasing");
  }
}

double score_configuration(const std::vector<FactorId>& members,
                           const Labeling& labeling,
                           const ControllabilityScale& scale,
                           Controllability fallback,
                           std::vector<FactorId>* missing) {
  if (members.empty()) throw InvalidArgument("configuration has no members");
  double total = 0.0;
  for (const auto& id : members) {
    auto it = labeling.find(id);
    if (it == labeling.end()) {
      if (missing) missing->push_back(id);
      total += scale(fallback);
    } else {
      total += scale(it->second);
    }
  }
  return total;
}

void score_report(AnalysisReport& report, const Perspective* perspective,
                  const ControllabilityScale& scale) {
  const auto labels = report.graph->labeling(perspective);
  for (auto& config : report.configurations) {
    config.score = score_configuration(config.members, labels, scale);
  }
  report.perspective = perspective ? perspective->label : std::string{};
}

AnalysisReport analyze(const FcmGraph& graph, const EnumerationOptions& options,
                       const Perspective* perspective,
                       const ControllabilityScale& scale) {
  if (perspective) (void)graph.with_perspective(*perspective);
  auto report = enumerate_configurations(graph, options);
  score_report(report, perspective, scale);
  return report;
}

std::vector<RankedConfiguration> rank_configurations(
    const AnalysisReport& report, const Perspective* perspective,
    const ControllabilityScale& scale) {
  const auto& graph = *report.graph;
  const auto labels = graph.labeling(perspective);

  std::vector<RankedConfiguration> out;
  out.reserve(report.configurations.size());
  for (const auto& config : report.configurations) {
    RankedConfiguration ranked;
    ranked.configuration = config;
    ranked.configuration.score = score_configuration(config.members, labels, scale);
    for (const auto& id : config.members) {
      const auto* factor = graph.find_factor(id);
      ranked.member_names.push_back(factor ? factor->name : id);
    }
    std::ranges::sort(ranked.member_names);
    out.push_back(std::move(ranked));
  }
  std::ranges::sort(out, [](const RankedConfiguration& a, const RankedConfiguration& b) {
    return std::tie(a.configuration.score, a.member_names, a.configuration.members) <
           std::tie(b.configuration.score, b.member_names, b.configuration.members);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

FrequencyTable node_frequencies(const AnalysisReport& report) {
  FrequencyTable out;
  for (const auto& f : report.graph->factors()) out.counts[f.id] = 0;
  for (const auto& config : report.configurations) {
    for (const auto& id : config.members) ++out.counts[id];
  }
  out.approximate = report.truncated;
  return out;
}

PerspectiveDiff compare_perspectives(const AnalysisReport& report,
                                     const Perspective& first,
                                     const Perspective& second,
                                     const ControllabilityScale& scale) {
  const auto& graph = *report.graph;
  // Rebuilding validates that both perspectives only name known factors.
  (void)graph.with_perspective(first);
  (void)graph.with_perspective(second);

  PerspectiveDiff out;
  out.first_label = first.label;
  out.second_label = second.label;

  const auto a = graph.labeling(&first);
  const auto b = graph.labeling(&second);
  for (const auto& f : graph.factors()) {
    const auto la = a.at(f.id);
    const auto lb = b.at(f.id);
    if (la != lb) out.disagreements.push_back({f.id, f.name, la, lb});
  }

  out.first_ranking = rank_configurations(report, &first, scale);
  out.second_ranking = rank_configurations(report, &second, scale);
  out.shared_best = !out.first_ranking.empty() && !out.second_ranking.empty() &&
                    out.first_ranking.front().configuration.members ==
                        out.second_ranking.front().configuration.members;
  return out;
}

PerspectiveDiff compare_perspectives(const FcmGraph& graph,
                                     const Perspective& first,
                                     const Perspective& second,
                                     const EnumerationOptions& options,
                                     const ControllabilityScale& scale) {
  const auto report = enumerate_configurations(graph, options);
  return compare_perspectives(report, first, second, scale);
}

namespace {

ScenarioSummary summarize(const AnalysisReport& report) {
  ScenarioSummary out;
  const auto& meta = report.graph->metadata();
  out.label = !meta.scenario.empty() ? meta.scenario : meta.title;
  out.configuration_count = report.configurations.size();
  out.configuration_size = report.configuration_size;
  out.truncated = report.truncated;
  std::set<FactorId> seen;
  for (const auto& config : report.configurations) {
    seen.insert(config.members.begin(), config.members.end());
  }
  out.possible_control_nodes.assign(seen.begin(), seen.end());
  return out;
}

}  // namespace

ScenarioDiff compare_scenarios(const AnalysisReport& first,
                               const AnalysisReport& second) {
  ScenarioDiff out;
  out.first = summarize(first);
  out.second = summarize(second);
  const auto& a = out.first.possible_control_nodes;
  const auto& b = out.second.possible_control_nodes;
  std::ranges::set_difference(a, b, std::back_inserter(out.only_first));
  std::ranges::set_difference(b, a, std::back_inserter(out.only_second));
  std::ranges::set_intersection(a, b, std::back_inserter(out.shared));
  return out;
}

}  // namespace levers
