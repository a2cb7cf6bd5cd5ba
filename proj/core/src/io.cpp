#include "levers/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "levers/errors.hpp"
#include "levers/json.hpp"

namespace levers {

using nlohmann::json;

namespace {

json parse_json(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

std::string dot_id(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& items, char separator) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += separator;
    out += items[i];
  }
  return out;
}

const char* outline_colour(Controllability level) {
  switch (level) {
    case Controllability::Easy: return "green";
    case Controllability::Medium: return "orange";
    case Controllability::Hard: return "red";
  }
  return "black";
}

const char* edge_colour(Sign sign) {
  switch (sign) {
    case Sign::Positive: return "green";
    case Sign::Negative: return "red";
    case Sign::Neutral: return "grey";
  }
  return "black";
}

int pen_width(Strength strength) {
  switch (strength) {
    case Strength::Weak: return 1;
    case Strength::Medium: return 2;
    case Strength::Strong: return 3;
  }
  return 1;
}

}  // namespace

FcmGraph parse_graph(std::string_view document) {
  return graph_from_json(parse_json(document));
}

std::string serialize_graph(const FcmGraph& graph) { return dump(graph_to_json(graph)); }

AnalysisReport parse_report(std::string_view document) {
  return report_from_json(parse_json(document));
}

std::string serialize_report(const AnalysisReport& report) {
  return dump(report_to_json(report));
}

std::string export_dot(const FcmGraph& graph, const AnalysisReport* report,
                       std::size_t rank) {
  std::vector<FactorId> highlighted;
  double total = 0;
  if (report && !report->configurations.empty()) {
    const auto ranking = rank_configurations(
        *report, report->graph->find_perspective(report->perspective));
    if (rank < 1 || rank > ranking.size()) {
      throw InvalidArgument("rank " + std::to_string(rank) + " outside 1.." +
                            std::to_string(ranking.size()));
    }
    highlighted = ranking[rank - 1].configuration.members;
    total = static_cast<double>(report->configurations.size());
  }

  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  const auto& title = graph.metadata().title;
  out << "digraph " << dot_id(title.empty() ? "fcm" : title) << " {\n";
  out << "  node [shape=ellipse, style=filled, fillcolor=white, penwidth=2];\n";
  for (const auto& f : graph.factors()) {
    const bool member = std::ranges::find(highlighted, f.id) != highlighted.end();
    out << "  " << dot_id(f.id) << " [label=" << dot_id(f.name)
        << ", color=" << outline_colour(f.controllability);
    if (member) out << ", fillcolor=grey";
    if (total > 0) {
      std::size_t count = 0;
      if (auto it = report->frequencies.find(f.id); it != report->frequencies.end()) {
        count = it->second;
      }
      out << ", width=" << 0.75 + 0.75 * static_cast<double>(count) / total;
    }
    out << "];\n";
  }
  for (const auto& link : graph.influences()) {
    out << "  " << dot_id(link.source) << " -> " << dot_id(link.target)
        << " [color=" << edge_colour(link.sign)
        << ", penwidth=" << pen_width(link.strength) << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string trajectory_to_csv(const FcmGraph& graph, const Trajectory& trajectory) {
  std::ostringstream out;
  out << std::setprecision(12);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i) out << ',';
    out << csv_field(graph.factor(i).name);
  }
  out << '\n';
  for (const auto& state : trajectory.states) {
    for (std::size_t i = 0; i < state.values.size(); ++i) {
      if (i) out << ',';
      out << state.values[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string ranking_to_csv(const std::vector<RankedConfiguration>& ranking) {
  std::ostringstream out;
  out << "rank,score,members,warnings\n";
  for (const auto& r : ranking) {
    out << r.rank << ',' << r.configuration.score << ','
        << csv_field(join(r.configuration.members, ';')) << ','
        << csv_field(join(r.configuration.warnings, ';')) << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  auto temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + temporary.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + temporary.string());
  }
  std::filesystem::rename(temporary, path);
}

}  // namespace levers
