#include "levers/service/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <nlohmann/json.hpp>

#include "levers/decision.hpp"
#include "levers/dynamics.hpp"
#include "levers/errors.hpp"
#include "levers/io.hpp"
#include "levers/json.hpp"

namespace levers::service {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? std::string(value) : std::move(fallback);
}

/// A request problem that maps straight onto an HTTP status and error code.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  json details = json::object();
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
  json error = {{"code", e.code}, {"message", e.message}};
  error.update(e.details);
  send_json(res, e.status, {{"error", std::move(error)}});
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const HttpError& e) {
      send_error(res, e);
    } catch (const SelfLoopError& e) {
      send_error(res, {422, "SELF_LOOPS", e.what(), {{"factors", e.ids()}}});
    } catch (const SchemaError& e) {
      send_error(res, {422, "SCHEMA_ERROR", e.what(), {{"path", e.path()}}});
    } catch (const EmptyGraphError& e) {
      send_error(res, {422, "SCHEMA_ERROR", e.what(), {{"path", ""}}});
    } catch (const InvalidArgument& e) {
      send_error(res, {422, "INVALID_ARGUMENT", e.what()});
    } catch (const NonFiniteError& e) {
      send_error(res, {422, "NON_FINITE", e.what(), {{"step", e.step()}}});
    } catch (const json::exception& e) {
      send_error(res, {400, "BAD_REQUEST", e.what()});
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw HttpError{400, "BAD_REQUEST", "request body is not valid JSON"};
  if (!body.is_object()) throw HttpError{400, "BAD_REQUEST", "request body must be a JSON object"};
  return body;
}

HttpError not_found(const std::string& what, const std::string& id) {
  return {404, "NOT_FOUND", what + " \"" + id + "\" not found"};
}

json graph_summary(const StoredGraph& g) {
  return {{"id", g.id},
          {"version", g.version},
          {"title", g.graph->metadata().title},
          {"scenario", g.graph->metadata().scenario},
          {"created_at", g.created_at},
          {"updated_at", g.updated_at}};
}

json job_to_json(const JobRecord& job) {
  json out = {{"id", job.id},
              {"graph_id", job.graph_id},
              {"graph_version", job.graph_version},
              {"status", job.status},
              {"progress", job.progress},
              {"budget",
               {{"max_configs", job.budget.max_configs},
                {"max_time_ms", job.budget.max_time.count()}}},
              {"perspective", job.perspective},
              {"created_at", job.created_at},
              {"finished_at", job.finished_at}};
  if (!job.error.empty()) out["error"] = job.error;
  out["result"] = job.report ? json::parse(*job.report) : json(nullptr);
  return out;
}

std::uint64_t parse_if_match(const httplib::Request& req) {
  if (!req.has_header("If-Match")) {
    throw HttpError{428, "PRECONDITION_REQUIRED", "If-Match header with the graph version is required"};
  }
  auto value = req.get_header_value("If-Match");
  if (value.starts_with("W/")) value.erase(0, 2);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    value = value.substr(1, value.size() - 2);
  }
  try {
    std::size_t used = 0;
    const auto version = std::stoull(value, &used);
    if (used == value.size()) return version;
  } catch (const std::exception&) {
  }
  throw HttpError{400, "BAD_REQUEST", "If-Match must hold a graph version number"};
}

Budget parse_budget(const json& body) {
  Budget budget;
  if (!body.contains("budget")) return budget;
  const auto& b = body["budget"];
  if (!b.is_object()) throw SchemaError("budget", "expected an object");
  if (b.contains("max_configs")) {
    if (!b["max_configs"].is_number_unsigned() || b["max_configs"].get<std::size_t>() == 0) {
      throw SchemaError("budget.max_configs", "expected a positive integer");
    }
    budget.max_configs = b["max_configs"].get<std::size_t>();
  }
  if (b.contains("max_time_ms")) {
    if (!b["max_time_ms"].is_number_unsigned()) {
      throw SchemaError("budget.max_time_ms", "expected a non-negative integer");
    }
    budget.max_time = std::chrono::milliseconds(b["max_time_ms"].get<std::int64_t>());
  }
  return budget;
}

/// A perspective given by label (looked up on the graph) or inline.
Perspective resolve_perspective(const FcmGraph& graph, const json& value, const std::string& path) {
  if (value.is_string()) {
    const auto label = value.get<std::string>();
    const auto* found = graph.find_perspective(label);
    if (!found) throw SchemaError(path, "unknown perspective \"" + label + "\"");
    return *found;
  }
  auto perspective = perspective_from_json(value, path);
  (void)graph.with_perspective(perspective);
  return perspective;
}

MappingSpec parse_mapping(const json& body) {
  MappingSpec mapping;
  if (body.contains("mapping")) {
    const auto& m = body["mapping"];
    if (m == "sigmoid") {
      mapping.kind = MappingKind::Sigmoid;
    } else if (m == "linear") {
      mapping.kind = MappingKind::Linear;
    } else {
      throw SchemaError("mapping", "expected \"sigmoid\" or \"linear\"");
    }
  }
  if (body.contains("lambda")) {
    if (!body["lambda"].is_number()) throw SchemaError("lambda", "expected a number");
    mapping.lambda = body["lambda"].get<double>();
  }
  return mapping;
}

IterationOptions parse_iteration(const FcmGraph& graph, const json& body) {
  IterationOptions options;
  if (body.contains("tol")) {
    if (!body["tol"].is_number()) throw SchemaError("tol", "expected a number");
    options.tolerance = body["tol"].get<double>();
  }
  if (body.contains("max_iter")) {
    if (!body["max_iter"].is_number_unsigned()) {
      throw SchemaError("max_iter", "expected a non-negative integer");
    }
    options.max_iterations = body["max_iter"].get<std::size_t>();
  }
  options.max_iterations = std::min(options.max_iterations, kMaxDynamicsIterations);
  if (body.contains("x0")) {
    const auto& x0 = body["x0"];
    const auto n = graph.size();
    std::vector<double> initial(n, parse_mapping(body).kind == MappingKind::Sigmoid ? 0.5 : 1.0);
    if (x0.is_array()) {
      if (x0.size() != n) throw SchemaError("x0", "expected " + std::to_string(n) + " values");
      for (std::size_t i = 0; i < n; ++i) {
        if (!x0[i].is_number()) throw SchemaError("x0[" + std::to_string(i) + "]", "expected a number");
        initial[i] = x0[i].get<double>();
      }
    } else if (x0.is_object()) {
      for (const auto& [id, value] : x0.items()) {
        const auto index = graph.index_of(id);
        if (!index) throw SchemaError("x0." + id, "unknown factor \"" + id + "\"");
        if (!value.is_number()) throw SchemaError("x0." + id, "expected a number");
        initial[*index] = value.get<double>();
      }
    } else {
      throw SchemaError("x0", "expected an array or an object keyed by factor id");
    }
    options.initial = std::move(initial);
  }
  return options;
}

}  // namespace

ServiceConfig ServiceConfig::from_environment() {
  ServiceConfig config;
  config.data_dir = env_or("LEVERS_DATA_DIR", "levers-data");
  config.token = env_or("LEVERS_TOKEN", "");
  config.max_jobs = static_cast<unsigned>(std::stoul(env_or("LEVERS_MAX_JOBS", "0")));
  config.port = std::stoi(env_or("LEVERS_PORT", "8080"));
  return config;
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(config_.data_dir),
      jobs_(store_, config_.max_jobs),
      http_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

void Service::run() { http_->listen_after_bind(); }

void Service::stop() {
  if (http_) http_->stop();
}

void Service::install_routes() {
  auto& http = *http_;
  http.set_default_headers({{kSchemaHeader, kSchemaVersion}});

  http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (config_.token.empty()) return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("Authorization") == "Bearer " + config_.token) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    res.set_header("WWW-Authenticate", "Bearer");
    send_error(res, {401, "UNAUTHORIZED", "missing or wrong bearer token"});
    return httplib::Server::HandlerResponse::Handled;
  });

  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, {res.status, res.status == 404 ? "NOT_FOUND" : "HTTP_ERROR",
                     httplib::status_message(res.status)});
    return httplib::Server::HandlerResponse::Handled;
  });

  http.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        send_error(res, {500, "INTERNAL", message});
      });

  http.Get("/", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              {{"schema_version", kSchemaVersion},
               {"endpoints",
                {"GET /graphs", "POST /graphs", "GET /graphs/{id}", "PUT /graphs/{id}",
                 "DELETE /graphs/{id}", "POST /graphs/{id}/analyses", "GET /analyses/{job}",
                 "GET /analyses/{job}/report", "DELETE /analyses/{job}",
                 "POST /graphs/{id}/dynamics", "POST /compare/perspectives",
                 "POST /compare/scenarios"}}});
  }));

  http.Get("/graphs", guarded([this](const httplib::Request&, httplib::Response& res) {
    json graphs = json::array();
    for (const auto& g : store_.list()) graphs.push_back(graph_summary(g));
    send_json(res, 200, {{"graphs", std::move(graphs)}});
  }));

  http.Post("/graphs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto stored = store_.create(parse_graph(req.body));
    res.set_header("Location", "/graphs/" + stored.id);
    res.set_header("ETag", "\"" + std::to_string(stored.version) + "\"");
    send_json(res, 201, {{"id", stored.id}, {"version", stored.version}});
  }));

  http.Get(R"(/graphs/([^/]+))",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto id = req.matches[1].str();
             const auto stored = store_.get(id);
             if (!stored) throw not_found("graph", id);
             auto body = graph_summary(*stored);
             body["graph"] = graph_to_json(*stored->graph);
             res.set_header("ETag", "\"" + std::to_string(stored->version) + "\"");
             send_json(res, 200, body);
           }));

  http.Put(R"(/graphs/([^/]+))",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto id = req.matches[1].str();
             if (!store_.get(id)) throw not_found("graph", id);
             const auto expected = parse_if_match(req);
             auto result = store_.update(id, expected, parse_graph(req.body));
             switch (result.status) {
               case WriteStatus::NotFound: throw not_found("graph", id);
               case WriteStatus::Conflict:
                 throw HttpError{409, "VERSION_CONFLICT",
                                 "graph \"" + id + "\" is at version " +
                                     std::to_string(result.stored.version),
                                 {{"current_version", result.stored.version}}};
               case WriteStatus::Ok: break;
             }
             res.set_header("ETag", "\"" + std::to_string(result.stored.version) + "\"");
             send_json(res, 200, {{"id", id}, {"version", result.stored.version}});
           }));

  http.Delete(R"(/graphs/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto id = req.matches[1].str();
                if (!store_.remove(id)) throw not_found("graph", id);
                res.status = 204;
              }));

  http.Post(R"(/graphs/([^/]+)/analyses)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto id = req.matches[1].str();
              const auto stored = store_.get(id);
              if (!stored) throw not_found("graph", id);
              const auto body = parse_body(req);
              const auto loops = detect_self_loops(*stored->graph);
              if (!loops.empty()) throw SelfLoopError(loops);
              const auto budget = parse_budget(body);
              std::optional<Perspective> perspective;
              if (body.contains("perspective") && !body["perspective"].is_null()) {
                perspective = resolve_perspective(*stored->graph, body["perspective"], "perspective");
              }
              const auto job = jobs_.submit(*stored, budget, std::move(perspective));
              res.set_header("Location", "/analyses/" + job.id);
              send_json(res, 202, job_to_json(job));
            }));

  http.Get(R"(/analyses/([^/]+))",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto id = req.matches[1].str();
             const auto job = jobs_.get(id);
             if (!job) throw not_found("analysis", id);
             send_json(res, 200, job_to_json(*job));
           }));

  // The report exactly as stored, for byte comparison with `levers analyze`.
  http.Get(R"(/analyses/([^/]+)/report)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto id = req.matches[1].str();
             const auto job = jobs_.get(id);
             if (!job) throw not_found("analysis", id);
             if (!job->report) {
               throw HttpError{409, "NOT_DONE", "analysis \"" + id + "\" is " + job->status};
             }
             res.status = 200;
             res.set_content(*job->report, "application/json");
           }));

  http.Delete(R"(/analyses/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto id = req.matches[1].str();
                const auto [outcome, job] = jobs_.cancel(id);
                switch (outcome) {
                  case CancelOutcome::NotFound: throw not_found("analysis", id);
                  case CancelOutcome::AlreadyFinished:
                    throw HttpError{409, "ALREADY_FINISHED",
                                    "analysis \"" + id + "\" is " + job.status};
                  case CancelOutcome::Cancelled: break;
                }
                send_json(res, 200, job_to_json(job));
              }));

  http.Post(R"(/graphs/([^/]+)/dynamics)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto id = req.matches[1].str();
              const auto stored = store_.get(id);
              if (!stored) throw not_found("graph", id);
              const auto body = parse_body(req);
              const auto& graph = *stored->graph;
              const auto mapping = parse_mapping(body);
              const auto options = parse_iteration(graph, body);
              const auto trajectory = iterate_to_fixed_point(graph, mapping, options);
              json ranking = nullptr;
              if (trajectory.fixed_point) ranking = rank_factors(*trajectory.fixed_point);
              send_json(res, 200,
                        {{"mapping", mapping.kind == MappingKind::Sigmoid ? "sigmoid" : "linear"},
                         {"lambda", mapping.lambda},
                         {"tol", options.tolerance},
                         {"max_iter", options.max_iterations},
                         {"trajectory", trajectory_to_json(trajectory)},
                         {"ranking", std::move(ranking)}});
            }));

  http.Post("/compare/perspectives",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto body = parse_body(req);
              std::shared_ptr<const FcmGraph> graph;
              if (body.contains("graph_id")) {
                const auto id = body["graph_id"].get<std::string>();
                const auto stored = store_.get(id);
                if (!stored) throw not_found("graph", id);
                graph = stored->graph;
              } else if (body.contains("graph")) {
                graph = std::make_shared<const FcmGraph>(graph_from_json(body["graph"]));
              } else {
                throw SchemaError("graph", "required (or graph_id)");
              }
              for (const char* key : {"p1", "p2"}) {
                if (!body.contains(key)) throw SchemaError(key, "required");
              }
              const auto p1 = resolve_perspective(*graph, body["p1"], "p1");
              const auto p2 = resolve_perspective(*graph, body["p2"], "p2");
              EnumerationOptions options;
              options.budget = parse_budget(body);
              send_json(res, 200, perspective_diff_to_json(compare_perspectives(*graph, p1, p2, options)));
            }));

  http.Post("/compare/scenarios",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto body = parse_body(req);
              auto load = [&](const char* key) {
                if (!body.contains(key)) throw SchemaError(key, "required");
                const auto& value = body[key];
                if (value.is_string()) {
                  const auto id = value.get<std::string>();
                  const auto job = jobs_.get(id);
                  if (!job) throw not_found("analysis", id);
                  if (!job->report) {
                    throw HttpError{409, "NOT_DONE", "analysis \"" + id + "\" is " + job->status};
                  }
                  return parse_report(*job->report);
                }
                return report_from_json(value);
              };
              const auto a = load("analysisA");
              const auto b = load("analysisB");
              send_json(res, 200, scenario_diff_to_json(compare_scenarios(a, b)));
            }));
}

}  // namespace levers::service
