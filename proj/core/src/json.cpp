#include "levers/json.hpp"

#include "levers/errors.hpp"

namespace levers {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw SchemaError(path, "expected an object");
}

const json* field(const json& object, const char* key) {
  auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

const json& required(const json& object, const char* key, const std::string& path) {
  const auto* value = field(object, key);
  if (!value) throw SchemaError(join(path, key), "missing required field");
  return *value;
}

std::string string_field(const json& object, const char* key,
                         const std::string& path, bool needed,
                         std::string fallback = {}) {
  const auto* value = needed ? &required(object, key, path) : field(object, key);
  if (!value || value->is_null()) return fallback;
  if (!value->is_string()) throw SchemaError(join(path, key), "expected a string");
  return value->get<std::string>();
}

std::size_t count_field(const json& object, const char* key, const std::string& path) {
  const auto& value = required(object, key, path);
  if (!value.is_number_unsigned()) {
    throw SchemaError(join(path, key), "expected a non-negative integer");
  }
  return value.get<std::size_t>();
}

const json& array_field(const json& object, const char* key,
                        const std::string& path, bool needed) {
  static const json empty = json::array();
  const auto* value = needed ? &required(object, key, path) : field(object, key);
  if (!value) return empty;
  if (!value->is_array()) throw SchemaError(join(path, key), "expected an array");
  return *value;
}

std::vector<std::string> string_list(const json& object, const char* key,
                                     const std::string& path, bool needed = true) {
  const auto& array = array_field(object, key, path, needed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array.size(); ++i) {
    if (!array[i].is_string()) {
      throw SchemaError(at_index(join(path, key), i), "expected a string");
    }
    out.push_back(array[i].get<std::string>());
  }
  return out;
}

template <typename Enum>
Enum enum_value(const json& value, const std::string& path,
                std::optional<Enum> (*parse)(std::string_view)) {
  if (!value.is_string()) throw SchemaError(path, "expected a string");
  const auto text = value.get<std::string>();
  auto parsed = parse(text);
  if (!parsed) throw SchemaError(path, "unknown value \"" + text + "\"");
  return *parsed;
}

Controllability level_value(const json& value, const std::string& path) {
  return enum_value<Controllability>(value, path, parse_controllability);
}

json ranked_to_json(const RankedConfiguration& r) {
  return {{"rank", r.rank},
          {"score", r.configuration.score},
          {"members", r.configuration.members},
          {"member_names", r.member_names},
          {"warnings", r.configuration.warnings}};
}

}  // namespace

json perspective_to_json(const Perspective& perspective) {
  json overrides = json::object();
  for (const auto& [id, level] : perspective.overrides) {
    overrides[id] = std::string(to_string(level));
  }
  return {{"label", perspective.label}, {"overrides", overrides}};
}

Perspective perspective_from_json(const json& document, const std::string& path) {
  require_object(document, path);
  Perspective out;
  out.label = string_field(document, "label", path, true);
  if (const auto* overrides = field(document, "overrides")) {
    const auto here = join(path, "overrides");
    require_object(*overrides, here);
    for (const auto& [id, level] : overrides->items()) {
      out.overrides[id] = level_value(level, join(here, id));
    }
  }
  return out;
}

json graph_to_json(const FcmGraph& graph) {
  const auto& meta = graph.metadata();
  json factors = json::array();
  for (const auto& f : graph.factors()) {
    json item = {{"id", f.id}, {"name", f.name}};
    if (!f.controllability_defaulted) {
      item["controllability"] = std::string(to_string(f.controllability));
    }
    factors.push_back(std::move(item));
  }
  json influences = json::array();
  for (const auto& link : graph.influences()) {
    influences.push_back({{"source", link.source},
                          {"target", link.target},
                          {"sign", std::string(to_string(link.sign))},
                          {"strength", std::string(to_string(link.strength))}});
  }
  json perspectives = json::array();
  for (const auto& p : graph.perspectives()) perspectives.push_back(perspective_to_json(p));

  json extras = json::object();
  for (const auto& [key, text] : meta.extras) extras[key] = json::parse(text);

  json out = {{"schema_version", meta.schema_version},
              {"title", meta.title},
              {"scenario", meta.scenario},
              {"factors", std::move(factors)},
              {"influences", std::move(influences)},
              {"perspectives", std::move(perspectives)}};
  if (!meta.perspective.empty()) out["perspective"] = meta.perspective;
  if (!extras.empty()) out["metadata"] = std::move(extras);
  return out;
}

FcmGraph graph_from_json(const json& document) {
  require_object(document, "");

  GraphMetadata meta;
  meta.schema_version = string_field(document, "schema_version", "", false, kSchemaVersion);
  if (meta.schema_version != kSchemaVersion) {
    throw SchemaError("schema_version",
                      "unsupported schema version \"" + meta.schema_version + "\"");
  }
  meta.title = string_field(document, "title", "", false);
  meta.scenario = string_field(document, "scenario", "", false);
  meta.perspective = string_field(document, "perspective", "", false);
  if (const auto* extras = field(document, "metadata")) {
    require_object(*extras, "metadata");
    for (const auto& [key, value] : extras->items()) meta.extras[key] = value.dump();
  }

  std::vector<Factor> factors;
  const auto& factor_array = array_field(document, "factors", "", true);
  for (std::size_t i = 0; i < factor_array.size(); ++i) {
    const auto path = at_index("factors", i);
    const auto& item = factor_array[i];
    require_object(item, path);
    Factor f;
    f.id = string_field(item, "id", path, true);
    f.name = string_field(item, "name", path, false, f.id);
    if (const auto* level = field(item, "controllability"); level && !level->is_null()) {
      f.controllability = level_value(*level, join(path, "controllability"));
    } else {
      f.controllability_defaulted = true;
    }
    factors.push_back(std::move(f));
  }

  std::vector<Influence> influences;
  const auto& link_array = array_field(document, "influences", "", false);
  for (std::size_t i = 0; i < link_array.size(); ++i) {
    const auto path = at_index("influences", i);
    const auto& item = link_array[i];
    require_object(item, path);
    Influence link;
    link.source = string_field(item, "source", path, true);
    link.target = string_field(item, "target", path, true);
    link.sign = enum_value<Sign>(required(item, "sign", path), join(path, "sign"), parse_sign);
    link.strength = enum_value<Strength>(required(item, "strength", path),
                                         join(path, "strength"), parse_strength);
    influences.push_back(std::move(link));
  }

  std::vector<Perspective> perspectives;
  const auto& perspective_array = array_field(document, "perspectives", "", false);
  for (std::size_t i = 0; i < perspective_array.size(); ++i) {
    perspectives.push_back(
        perspective_from_json(perspective_array[i], at_index("perspectives", i)));
  }

  return FcmGraph(std::move(factors), std::move(influences), std::move(meta),
                  std::move(perspectives));
}

json classification_to_json(const NodeClassification& classes) {
  return {{"always", classes.always},
          {"never", classes.never},
          {"sometimes", classes.sometimes}};
}

json report_to_json(const AnalysisReport& report) {
  json configurations = json::array();
  for (const auto& c : report.configurations) {
    configurations.push_back(
        {{"members", c.members}, {"score", c.score}, {"warnings", c.warnings}});
  }
  json components = json::array();
  for (const auto& c : report.components) {
    components.push_back({{"factors", c.factors},
                          {"m", c.matching_size},
                          {"D", c.configuration_size},
                          {"configuration_count", c.configuration_count}});
  }
  json frequencies = json::object();
  for (const auto& [id, count] : report.frequencies) frequencies[id] = count;

  return {{"schema_version", kSchemaVersion},
          {"graph", graph_to_json(*report.graph)},
          {"m", report.matching_size},
          {"D", report.configuration_size},
          {"classification", classification_to_json(report.classification)},
          {"components", std::move(components)},
          {"configurations", std::move(configurations)},
          {"frequencies", std::move(frequencies)},
          {"truncated", report.truncated},
          {"truncation_reason", report.truncation_reason},
          {"perspective", report.perspective},
          {"candidates_tested", report.candidates_tested},
          {"warnings",
           {{"neutral_influences", report.neutral_influences},
            {"defaulted_controllability", report.defaulted_controllability}}}};
}

AnalysisReport report_from_json(const json& document) {
  require_object(document, "");
  AnalysisReport out;
  out.graph = std::make_shared<const FcmGraph>(
      graph_from_json(required(document, "graph", "")));
  out.matching_size = count_field(document, "m", "");
  out.configuration_size = count_field(document, "D", "");

  const auto& classes = required(document, "classification", "");
  require_object(classes, "classification");
  out.classification.always = string_list(classes, "always", "classification");
  out.classification.never = string_list(classes, "never", "classification");
  out.classification.sometimes = string_list(classes, "sometimes", "classification");

  const auto& components = array_field(document, "components", "", false);
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto path = at_index("components", i);
    require_object(components[i], path);
    ComponentSummary c;
    c.factors = string_list(components[i], "factors", path);
    c.matching_size = count_field(components[i], "m", path);
    c.configuration_size = count_field(components[i], "D", path);
    c.configuration_count = count_field(components[i], "configuration_count", path);
    out.components.push_back(std::move(c));
  }

  const auto& configurations = array_field(document, "configurations", "", true);
  for (std::size_t i = 0; i < configurations.size(); ++i) {
    const auto path = at_index("configurations", i);
    const auto& item = configurations[i];
    require_object(item, path);
    ControlConfiguration c;
    c.members = string_list(item, "members", path);
    c.warnings = string_list(item, "warnings", path, false);
    if (const auto* score = field(item, "score")) {
      if (!score->is_number()) throw SchemaError(join(path, "score"), "expected a number");
      c.score = score->get<double>();
    }
    for (const auto& id : c.members) {
      if (!out.graph->find_factor(id)) {
        throw SchemaError(join(path, "members"), "unknown factor id \"" + id + "\"");
      }
    }
    out.configurations.push_back(std::move(c));
  }

  if (const auto* frequencies = field(document, "frequencies")) {
    require_object(*frequencies, "frequencies");
    for (const auto& [id, count] : frequencies->items()) {
      if (!count.is_number_unsigned()) {
        throw SchemaError(join("frequencies", id), "expected a non-negative integer");
      }
      out.frequencies[id] = count.get<std::size_t>();
    }
  }
  if (const auto* truncated = field(document, "truncated")) {
    if (!truncated->is_boolean()) throw SchemaError("truncated", "expected a boolean");
    out.truncated = truncated->get<bool>();
  }
  out.truncation_reason = string_field(document, "truncation_reason", "", false);
  out.perspective = string_field(document, "perspective", "", false);
  if (const auto* tested = field(document, "candidates_tested");
      tested && tested->is_number_unsigned()) {
    out.candidates_tested = tested->get<std::size_t>();
  }
  if (const auto* warnings = field(document, "warnings")) {
    require_object(*warnings, "warnings");
    out.neutral_influences = string_list(*warnings, "neutral_influences", "warnings", false);
    out.defaulted_controllability =
        string_list(*warnings, "defaulted_controllability", "warnings", false);
  }
  return out;
}

json ranking_to_json(const std::vector<RankedConfiguration>& ranking) {
  json out = json::array();
  for (const auto& r : ranking) out.push_back(ranked_to_json(r));
  return out;
}

json perspective_diff_to_json(const PerspectiveDiff& diff) {
  json disagreements = json::array();
  for (const auto& d : diff.disagreements) {
    disagreements.push_back({{"id", d.id},
                             {"name", d.name},
                             {"first", std::string(to_string(d.first))},
                             {"second", std::string(to_string(d.second))}});
  }
  return {{"first", diff.first_label},
          {"second", diff.second_label},
          {"disagreements", std::move(disagreements)},
          {"first_ranking", ranking_to_json(diff.first_ranking)},
          {"second_ranking", ranking_to_json(diff.second_ranking)},
          {"shared_best", diff.shared_best}};
}

json scenario_diff_to_json(const ScenarioDiff& diff) {
  auto side = [](const ScenarioSummary& s) {
    return json{{"label", s.label},
                {"configuration_count", s.configuration_count},
                {"configuration_size", s.configuration_size},
                {"truncated", s.truncated},
                {"possible_control_nodes", s.possible_control_nodes}};
  };
  return {{"first", side(diff.first)},
          {"second", side(diff.second)},
          {"only_first", diff.only_first},
          {"only_second", diff.only_second},
          {"shared", diff.shared}};
}

json state_to_json(const StateVector& state) {
  json values = json::object();
  for (std::size_t i = 0; i < state.ids.size(); ++i) values[state.ids[i]] = state.values[i];
  return {{"step", state.step}, {"values", std::move(values)}};
}

json trajectory_to_json(const Trajectory& trajectory) {
  json states = json::array();
  for (const auto& s : trajectory.states) states.push_back(state_to_json(s));
  json out = {{"converged", trajectory.converged}, {"states", std::move(states)}};
  out["fixed_point"] =
      trajectory.fixed_point ? state_to_json(*trajectory.fixed_point) : json(nullptr);
  return out;
}

ControllabilityScale scale_from_json(const json& document) {
  require_object(document, "");
  ControllabilityScale scale;
  auto read = [&](const char* key, double& slot) {
    if (const auto* value = field(document, key)) {
      if (!value->is_number()) throw SchemaError(key, "expected a number");
      slot = value->get<double>();
    }
  };
  read("Easy", scale.easy);
  read("Medium", scale.medium);
  read("Hard", scale.hard);
  scale.validate();
  return scale;
}

}  // namespace levers
