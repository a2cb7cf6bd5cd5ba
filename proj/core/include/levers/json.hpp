#pragma once

// JSON document model for graphs, reports and comparison results. All
// from_json conversions throw SchemaError with a path to the bad element.

#include <string>

#include <nlohmann/json.hpp>

#include "levers/controllability.hpp"
#include "levers/decision.hpp"
#include "levers/dynamics.hpp"
#include "levers/fcm.hpp"

namespace levers {

inline constexpr const char* kSchemaVersion = "1";

nlohmann::json graph_to_json(const FcmGraph& graph);
FcmGraph graph_from_json(const nlohmann::json& document);

nlohmann::json perspective_to_json(const Perspective& perspective);
Perspective perspective_from_json(const nlohmann::json& document,
                                  const std::string& path = "");

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& document);

nlohmann::json ranking_to_json(const std::vector<RankedConfiguration>& ranking);
nlohmann::json perspective_diff_to_json(const PerspectiveDiff& diff);
nlohmann::json scenario_diff_to_json(const ScenarioDiff& diff);
nlohmann::json classification_to_json(const NodeClassification& classes);

nlohmann::json trajectory_to_json(const Trajectory& trajectory);
nlohmann::json state_to_json(const StateVector& state);

/// {"Easy": 1, "Medium": 2, "Hard": 3}; missing keys keep defaults.
ControllabilityScale scale_from_json(const nlohmann::json& document);

}  // namespace levers
