#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "levers/controllability.hpp"
#include "levers/decision.hpp"
#include "levers/dynamics.hpp"
#include "levers/fcm.hpp"

namespace levers {

/// Parses a graph document (UTF-8 JSON). Throws SchemaError.
FcmGraph parse_graph(std::string_view document);
/// Pretty-printed, keys sorted, trailing newline. parse_graph inverts it.
std::string serialize_graph(const FcmGraph& graph);

AnalysisReport parse_report(std::string_view document);
/// Deterministic text: equal reports serialize byte-for-byte equal.
std::string serialize_report(const AnalysisReport& report);

/// Graphviz rendering. Node outline follows the traffic-light controllability
/// colours, edge colour the sign and pen width the strength. With a report,
/// the configuration at 1-based `rank` (ease-of-control order) is filled grey
/// and node width grows with how often the factor appears in configurations.
std::string export_dot(const FcmGraph& graph,
                       const AnalysisReport* report = nullptr,
                       std::size_t rank = 1);

/// Header is the factor names, then one row per step.
std::string trajectory_to_csv(const FcmGraph& graph, const Trajectory& trajectory);

/// Columns: rank, score, members (semicolon-joined ids), warnings.
std::string ranking_to_csv(const std::vector<RankedConfiguration>& ranking);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace levers
