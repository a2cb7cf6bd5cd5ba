#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "levers/controllability.hpp"
#include "levers/decision.hpp"
#include "levers/dynamics.hpp"
#include "levers/errors.hpp"
#include "levers/io.hpp"
#include "levers/json.hpp"

namespace {

using namespace levers;

constexpr int kExitError = 1;
constexpr int kExitSelfLoops = 2;
constexpr int kExitTruncated = 3;

std::string join(const std::vector<std::string>& items, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

const Perspective& require_perspective(const FcmGraph& graph, const std::string& label) {
  const auto* p = graph.find_perspective(label);
  if (!p) {
    std::vector<std::string> known;
    for (const auto& q : graph.perspectives()) known.push_back("\"" + q.label + "\"");
    throw InvalidArgument("no perspective \"" + label + "\" (known: " +
                          (known.empty() ? "none" : join(known, ", ")) + ")");
  }
  return *p;
}

void print_ranking(const std::vector<RankedConfiguration>& ranking) {
  for (const auto& r : ranking) {
    std::cout << std::setw(4) << r.rank << "  " << std::setw(6) << r.configuration.score << "  "
              << join(r.member_names, ", ");
    if (!r.configuration.warnings.empty()) {
      std::cout << "  [" << join(r.configuration.warnings, "; ") << "]";
    }
    std::cout << "\n";
  }
}

struct AnalyzeArgs {
  std::string graph;
  std::size_t max_configs = Budget{}.max_configs;
  std::int64_t max_ms = Budget{}.max_time.count();
  std::string out;
};

int analyze_command(const AnalyzeArgs& args) {
  const auto graph = parse_graph(read_file(args.graph));
  EnumerationOptions options;
  options.budget.max_configs = args.max_configs;
  options.budget.max_time = std::chrono::milliseconds(args.max_ms);
  const auto report = analyze(graph, options);
  const auto bytes = serialize_report(report);
  if (args.out.empty()) {
    std::cout << bytes;
  } else {
    write_file(args.out, bytes);
    std::cout << "D = " << report.configuration_size << ", m = " << report.matching_size << ", "
              << report.configurations.size() << " configuration(s)";
    if (report.truncated) std::cout << " (truncated: " << report.truncation_reason << ")";
    std::cout << "\nwrote " << args.out << "\n";
  }
  if (report.truncated) {
    std::cerr << "levers: enumeration stopped early (" << report.truncation_reason
              << "); results cover the configurations found so far\n";
    return kExitTruncated;
  }
  return 0;
}

int classify_command(const std::string& path, bool as_json) {
  const auto graph = parse_graph(read_file(path));
  const auto classes = classify_nodes(graph);
  if (as_json) {
    std::cout << classification_to_json(classes).dump(2) << "\n";
    return 0;
  }
  std::cout << "always:    " << join(classes.always) << "\n"
            << "never:     " << join(classes.never) << "\n"
            << "sometimes: " << join(classes.sometimes) << "\n";
  return 0;
}

int rank_command(const std::string& path, const std::string& label, bool csv) {
  const auto report = parse_report(read_file(path));
  const Perspective* perspective = nullptr;
  if (!label.empty()) perspective = &require_perspective(*report.graph, label);
  const auto ranking = rank_configurations(report, perspective);
  if (csv) {
    std::cout << ranking_to_csv(ranking);
  } else {
    std::cout << "rank   score  members\n";
    print_ranking(ranking);
  }
  if (report.truncated) std::cerr << "levers: report is truncated; ranking covers a prefix only\n";
  return 0;
}

struct SimulateArgs {
  std::string graph;
  std::string mapping = "sigmoid";
  double lambda = 1.0;
  double tol = IterationOptions{}.tolerance;
  std::size_t max_iter = IterationOptions{}.max_iterations;
  std::string csv;
};

int simulate_command(const SimulateArgs& args) {
  const auto graph = parse_graph(read_file(args.graph));
  MappingSpec mapping{args.mapping == "linear" ? MappingKind::Linear : MappingKind::Sigmoid,
                      args.lambda};
  IterationOptions options;
  options.tolerance = args.tol;
  options.max_iterations = args.max_iter;
  const auto trajectory = iterate_to_fixed_point(graph, mapping, options);
  if (!args.csv.empty()) write_file(args.csv, trajectory_to_csv(graph, trajectory));
  if (!trajectory.converged) {
    std::cout << "did not converge within " << args.max_iter << " steps\n";
    return 0;
  }
  const auto& fixed = *trajectory.fixed_point;
  std::cout << "converged after " << fixed.step << " steps\n";
  std::cout << std::fixed << std::setprecision(6);
  std::size_t position = 1;
  for (const auto& id : rank_factors(fixed)) {
    std::cout << std::setw(4) << position++ << "  " << fixed.at(id) << "  "
              << graph.find_factor(id)->name << "\n";
  }
  return 0;
}

int compare_scenarios_command(const std::string& a, const std::string& b, bool as_json) {
  const auto diff = compare_scenarios(parse_report(read_file(a)), parse_report(read_file(b)));
  if (as_json) {
    std::cout << scenario_diff_to_json(diff).dump(2) << "\n";
    return 0;
  }
  for (const auto* s : {&diff.first, &diff.second}) {
    std::cout << (s->label.empty() ? "(untitled)" : s->label) << ": " << s->configuration_count
              << " configuration(s) of size " << s->configuration_size
              << (s->truncated ? " (truncated)" : "") << "\n";
  }
  std::cout << "only in first:  " << join(diff.only_first) << "\n"
            << "only in second: " << join(diff.only_second) << "\n"
            << "in both:        " << join(diff.shared) << "\n";
  return 0;
}

int compare_perspectives_command(const std::string& path, const std::string& l1,
                                 const std::string& l2, bool as_json) {
  const auto graph = parse_graph(read_file(path));
  const auto diff = compare_perspectives(graph, require_perspective(graph, l1),
                                         require_perspective(graph, l2));
  if (as_json) {
    std::cout << perspective_diff_to_json(diff).dump(2) << "\n";
    return 0;
  }
  std::cout << "ratings that differ:\n";
  for (const auto& d : diff.disagreements) {
    std::cout << "  " << d.name << ": " << to_string(d.first) << " vs " << to_string(d.second)
              << "\n";
  }
  std::cout << "\n" << diff.first_label << ":\n";
  print_ranking(diff.first_ranking);
  std::cout << "\n" << diff.second_label << ":\n";
  print_ranking(diff.second_ranking);
  std::cout << "\nsame best configuration: " << (diff.shared_best ? "yes" : "no") << "\n";
  return 0;
}

int export_dot_command(const std::string& graph_path, const std::string& report_path,
                       std::size_t rank, const std::string& out) {
  const auto graph = parse_graph(read_file(graph_path));
  std::optional<AnalysisReport> report;
  if (!report_path.empty()) report = parse_report(read_file(report_path));
  const auto dot = export_dot(graph, report ? &*report : nullptr, rank);
  if (out.empty()) {
    std::cout << dot;
  } else {
    write_file(out, dot);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural controllability analysis of fuzzy cognitive maps"};
  app.require_subcommand(1);
  int status = 0;

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Enumerate minimum control configurations");
  analyze_cmd->add_option("graph", analyze_args.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--budget-configs", analyze_args.max_configs, "Stop after N configurations")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--budget-ms", analyze_args.max_ms, "Stop after MS milliseconds")
      ->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--out", analyze_args.out, "Write the report here instead of stdout");
  analyze_cmd->callback([&] { status = analyze_command(analyze_args); });

  std::string classify_path;
  bool classify_json = false;
  auto* classify_cmd = app.add_subcommand("classify", "Which factors are in all, none or some configurations");
  classify_cmd->add_option("graph", classify_path, "Graph JSON")->required()->check(CLI::ExistingFile);
  classify_cmd->add_flag("--json", classify_json, "Print JSON");
  classify_cmd->callback([&] { status = classify_command(classify_path, classify_json); });

  std::string rank_path, rank_perspective;
  bool rank_csv = false;
  auto* rank_cmd = app.add_subcommand("rank", "Rank the configurations of a report");
  rank_cmd->add_option("report", rank_path, "Report JSON")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--perspective", rank_perspective, "Score with this perspective's ratings");
  rank_cmd->add_flag("--csv", rank_csv, "Print CSV");
  rank_cmd->callback([&] { status = rank_command(rank_path, rank_perspective, rank_csv); });

  SimulateArgs simulate_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Iterate the map to a fixed point");
  simulate_cmd->add_option("graph", simulate_args.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--mapping", simulate_args.mapping, "sigmoid or linear")
      ->check(CLI::IsMember({"sigmoid", "linear"}));
  simulate_cmd->add_option("--lambda", simulate_args.lambda, "Sigmoid steepness")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--tol", simulate_args.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--max-iter", simulate_args.max_iter, "Step limit");
  simulate_cmd->add_option("--csv", simulate_args.csv, "Write the trajectory as CSV");
  simulate_cmd->callback([&] { status = simulate_command(simulate_args); });

  std::string scenario_a, scenario_b;
  bool scenarios_json = false;
  auto* scenarios_cmd = app.add_subcommand("compare-scenarios", "Compare two analysis reports");
  scenarios_cmd->add_option("first", scenario_a, "Report JSON")->required()->check(CLI::ExistingFile);
  scenarios_cmd->add_option("second", scenario_b, "Report JSON")->required()->check(CLI::ExistingFile);
  scenarios_cmd->add_flag("--json", scenarios_json, "Print JSON");
  scenarios_cmd->callback([&] { status = compare_scenarios_command(scenario_a, scenario_b, scenarios_json); });

  std::string perspectives_graph, first_label, second_label;
  bool perspectives_json = false;
  auto* perspectives_cmd =
      app.add_subcommand("compare-perspectives", "Compare two perspectives on one graph");
  perspectives_cmd->add_option("graph", perspectives_graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  perspectives_cmd->add_option("first", first_label, "Perspective label")->required();
  perspectives_cmd->add_option("second", second_label, "Perspective label")->required();
  perspectives_cmd->add_flag("--json", perspectives_json, "Print JSON");
  perspectives_cmd->callback([&] {
    status = compare_perspectives_command(perspectives_graph, first_label, second_label, perspectives_json);
  });

  std::string dot_graph, dot_report, dot_out;
  std::size_t dot_rank = 1;
  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering with configuration shading");
  dot_cmd->add_option("graph", dot_graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  dot_cmd->add_option("--report", dot_report, "Shade members and size nodes from this report")
      ->check(CLI::ExistingFile);
  dot_cmd->add_option("--rank", dot_rank, "Which ranked configuration to shade")->check(CLI::PositiveNumber);
  dot_cmd->add_option("--out", dot_out, "Write here instead of stdout");
  dot_cmd->callback([&] { status = export_dot_command(dot_graph, dot_report, dot_rank, dot_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const SelfLoopError& e) {
    std::cerr << "levers: " << e.what()
              << "\nremove the self-influences or model them through an intermediate factor\n";
    return kExitSelfLoops;
  } catch (const std::exception& e) {
    std::cerr << "levers: " << e.what() << "\n";
    return kExitError;
  }
  return status;
}
