#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "levers/controllability.hpp"
#include "levers/fcm.hpp"

namespace levers {

using Labeling = std::map<FactorId, Controllability>;

/// Ordinal cost of steering a factor at each controllability level.
/// Lower totals mean an easier configuration.
struct ControllabilityScale {
  double easy = 1.0;
  double medium = 2.0;
  double hard = 3.0;

  double operator()(Controllability level) const;
  /// Throws InvalidArgument unless easy < medium < hard.
  void validate() const;
};

/// Sum of scale(level) over members. Members missing from `labeling` count
/// at `fallback` and are appended to `missing` when given. Throws
/// InvalidArgument on an empty member list.
double score_configuration(const std::vector<FactorId>& members,
                           const Labeling& labeling,
                           const ControllabilityScale& scale = {},
                           Controllability fallback = Controllability::Medium,
                           std::vector<FactorId>* missing = nullptr);

/// Writes scores into every configuration of the report using the graph's
/// labels with `perspective` overrides applied.
void score_report(AnalysisReport& report, const Perspective* perspective = nullptr,
                  const ControllabilityScale& scale = {});

/// enumerate_configurations followed by score_report. Both front ends use
/// this so the same graph and budget give the same report bytes.
AnalysisReport analyze(const FcmGraph& graph, const EnumerationOptions& options = {},
                       const Perspective* perspective = nullptr,
                       const ControllabilityScale& scale = {});

struct RankedConfiguration {
  std::size_t rank = 0;  // 1-based
  ControlConfiguration configuration;
  std::vector<std::string> member_names;  // sorted
};

/// Ascending score, then member names, then member ids.
std::vector<RankedConfiguration> rank_configurations(
    const AnalysisReport& report, const Perspective* perspective = nullptr,
    const ControllabilityScale& scale = {});

struct FrequencyTable {
  std::map<FactorId, std::size_t> counts;
  // Counts cover only the configurations found before truncation.
  bool approximate = false;
};

FrequencyTable node_frequencies(const AnalysisReport& report);

struct LabelDisagreement {
  FactorId id;
  std::string name;
  Controllability first;
  Controllability second;

  friend bool operator==(const LabelDisagreement&, const LabelDisagreement&) = default;
};

struct PerspectiveDiff {
  std::string first_label;
  std::string second_label;
  std::vector<LabelDisagreement> disagreements;
  std::vector<RankedConfiguration> first_ranking;
  std::vector<RankedConfiguration> second_ranking;
  // Both perspectives put the same configuration first.
  bool shared_best = false;
};

/// Ranks one structural analysis under two perspectives.
PerspectiveDiff compare_perspectives(const AnalysisReport& report,
                                     const Perspective& first,
                                     const Perspective& second,
                                     const ControllabilityScale& scale = {});

/// Enumerates `graph` once, then compares. Throws SchemaError if a
/// perspective names a factor the graph lacks.
PerspectiveDiff compare_perspectives(const FcmGraph& graph,
                                     const Perspective& first,
                                     const Perspective& second,
                                     const EnumerationOptions& options = {},
                                     const ControllabilityScale& scale = {});

struct ScenarioSummary {
  std::string label;
  std::size_t configuration_count = 0;
  std::size_t configuration_size = 0;
  bool truncated = false;
  // Factors appearing in at least one configuration, sorted.
  std::vector<FactorId> possible_control_nodes;
};

struct ScenarioDiff {
  ScenarioSummary first;
  ScenarioSummary second;
  std::vector<FactorId> only_first;
  std::vector<FactorId> only_second;
  std::vector<FactorId> shared;
};

ScenarioDiff compare_scenarios(const AnalysisReport& first,
                               const AnalysisReport& second);

}  // namespace levers
