#include <gtest/gtest.h>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#include "levers/decision.hpp"
#include "levers/io.hpp"
#include "levers/json.hpp"
#include "levers/service/server.hpp"
#include "support/oracles.hpp"

namespace levers::service {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path fresh_dir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  auto dir = fs::temp_directory_path() /
             ("levers-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  return dir;
}

std::string fixture(const std::string& name) {
  return read_file(fs::path(LEVERS_FIXTURES) / name);
}

/// A service on a free local port, served from a background thread.
class Running {
 public:
  explicit Running(ServiceConfig config) : service_(std::move(config)) {
    port_ = service_.bind("127.0.0.1", 0);
    if (port_ <= 0) throw std::runtime_error("bind failed");
    thread_ = std::thread([this] { service_.run(); });
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    if (!service_.config().token.empty()) c.set_bearer_token_auth(service_.config().token);
    return c;
  }
  Service& service() { return service_; }

 private:
  Service service_;
  int port_ = 0;
  std::thread thread_;
};

json body_of(const httplib::Result& r) { return json::parse(r->body); }

std::string create(httplib::Client& c, const std::string& doc) {
  auto r = c.Post("/graphs", doc, "application/json");
  if (!r || r->status != 201) throw std::runtime_error("create failed");
  return body_of(r)["id"].get<std::string>();
}

json wait_for(httplib::Client& c, const std::string& job) {
  for (int i = 0; i < 3000; ++i) {
    auto r = c.Get("/analyses/" + job);
    auto body = body_of(r);
    const auto status = body["status"].get<std::string>();
    if (status != "queued" && status != "running") return body;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  throw std::runtime_error("job did not finish");
}

std::string submit(httplib::Client& c, const std::string& graph, const json& body = json::object()) {
  auto r = c.Post("/graphs/" + graph + "/analyses", body.dump(), "application/json");
  if (!r || r->status != 202) throw std::runtime_error("submit failed: " + (r ? r->body : ""));
  return body_of(r)["id"].get<std::string>();
}

/// Twelve sources each feeding all of twenty-four sinks: far too many
/// configurations to finish inside a test.
std::string huge_fan() {
  std::vector<std::string> ids;
  std::vector<testing::Edge> edges;
  for (int s = 0; s < 12; ++s) ids.push_back("s" + std::to_string(100 + s));
  for (int t = 0; t < 24; ++t) ids.push_back("t" + std::to_string(100 + t));
  for (int s = 0; s < 12; ++s) {
    for (int t = 0; t < 24; ++t) edges.emplace_back(ids[s], ids[12 + t]);
  }
  return serialize_graph(testing::make_graph(ids, edges));
}

TEST(Service, GraphCrudAndSchemaHeader) {
  Running server({});
  auto c = server.client();
  const auto doc = fixture("star.json");
  auto r = c.Post("/graphs", doc, "application/json");
  ASSERT_EQ(r->status, 201);
  EXPECT_EQ(r->get_header_value(kSchemaHeader), "1");
  const auto id = body_of(r)["id"].get<std::string>();
  EXPECT_EQ(body_of(r)["version"], 1);
  EXPECT_EQ(r->get_header_value("Location"), "/graphs/" + id);

  r = c.Get("/graphs/" + id);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(graph_from_json(body_of(r)["graph"]), parse_graph(doc));
  EXPECT_EQ(r->get_header_value("ETag"), "\"1\"");

  r = c.Get("/graphs");
  ASSERT_EQ(body_of(r)["graphs"].size(), 1u);
  EXPECT_EQ(body_of(r)["graphs"][0]["id"], id);

  r = c.Delete("/graphs/" + id);
  EXPECT_EQ(r->status, 204);
  r = c.Get("/graphs/" + id);
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(r->get_header_value(kSchemaHeader), "1");
  EXPECT_EQ(body_of(r)["error"]["code"], "NOT_FOUND");

  r = c.Get("/nowhere");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(r->get_header_value(kSchemaHeader), "1");
}

TEST(Service, SchemaErrorsCarryPaths) {
  Running server({});
  auto c = server.client();
  auto r = c.Post("/graphs", R"({"factors":[{"id":"a","name":"A"},{"id":"b","name":"B"}],
    "influences":[{"source":"a","target":"b","sign":"Positive","strength":"Weak"},
                  {"source":"a","target":"b","sign":"Negative","strength":"Strong"}]})",
                  "application/json");
  ASSERT_EQ(r->status, 422);
  const auto error = body_of(r)["error"];
  EXPECT_EQ(error["code"], "SCHEMA_ERROR");
  EXPECT_EQ(error["path"], "influences[1]");
  EXPECT_NE(error["message"].get<std::string>().find("a->b"), std::string::npos);

  r = c.Post("/graphs", "{oops", "application/json");
  EXPECT_EQ(r->status, 422);
}

TEST(Service, StaleWritesAreRejected) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("path.json"));
  const auto doc = fixture("star.json");

  auto r = c.Put("/graphs/" + id, doc, "application/json");
  EXPECT_EQ(r->status, 428);

  r = c.Put("/graphs/" + id, {{"If-Match", "\"1\""}}, doc, "application/json");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body_of(r)["version"], 2);

  r = c.Put("/graphs/" + id, {{"If-Match", "1"}}, doc, "application/json");
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(body_of(r)["error"]["code"], "VERSION_CONFLICT");
  EXPECT_EQ(body_of(r)["error"]["current_version"], 2);
}

TEST(Service, RacingWritersLinearize) {
  Running server({});
  auto setup = server.client();
  const auto id = create(setup, fixture("path.json"));
  const auto doc = fixture("star.json");

  for (std::uint64_t round = 1; round <= 5; ++round) {
    std::atomic<int> ok{0}, conflict{0};
    std::vector<std::thread> writers;
    for (int w = 0; w < 8; ++w) {
      writers.emplace_back([&] {
        auto c = server.client();
        auto r = c.Put("/graphs/" + id, {{"If-Match", std::to_string(round)}}, doc,
                       "application/json");
        if (r && r->status == 200) ++ok;
        if (r && r->status == 409) ++conflict;
      });
    }
    for (auto& t : writers) t.join();
    EXPECT_EQ(ok.load(), 1);
    EXPECT_EQ(conflict.load(), 7);
  }
  EXPECT_EQ(body_of(setup.Get("/graphs/" + id))["version"], 6);
}

TEST(Service, PathAnalysisMatchesOracle) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("path.json"));
  const auto job = wait_for(c, submit(c, id));
  ASSERT_EQ(job["status"], "done");
  const auto& configs = job["result"]["configurations"];
  ASSERT_EQ(configs.size(), 1u);
  EXPECT_EQ(configs[0]["members"], json::array({"a"}));

  const auto graph = parse_graph(fixture("path.json"));
  std::vector<std::vector<FactorId>> found;
  for (const auto& cfg : configs) found.push_back(cfg["members"].get<std::vector<FactorId>>());
  EXPECT_EQ(found, testing::brute_force_configurations(graph));
}

TEST(Service, SelfLoopsAreRefused) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("self_loop.json"));
  auto r = c.Post("/graphs/" + id + "/analyses", "{}", "application/json");
  ASSERT_EQ(r->status, 422);
  const auto error = body_of(r)["error"];
  EXPECT_EQ(error["code"], "SELF_LOOPS");
  EXPECT_EQ(error["factors"], json::array({"a"}));
}

TEST(Service, ReportsMatchTheCliBytesAndAreReproducible) {
  Running server({});
  auto c = server.client();
  const auto doc = fixture("two_components.json");
  const auto id = create(c, doc);
  const auto first = submit(c, id);
  const auto second = submit(c, id);
  wait_for(c, first);
  wait_for(c, second);
  const auto a = c.Get("/analyses/" + first + "/report")->body;
  const auto b = c.Get("/analyses/" + second + "/report")->body;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, serialize_report(analyze(parse_graph(doc))));
}

TEST(Service, JobsKeepTheirGraphVersion) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("path.json"));
  const auto job = submit(c, id);
  const auto before = wait_for(c, job);
  ASSERT_EQ(c.Put("/graphs/" + id, {{"If-Match", "1"}}, fixture("star.json"), "application/json")->status,
            200);
  const auto after = body_of(c.Get("/analyses/" + job));
  EXPECT_EQ(after["graph_version"], 1);
  EXPECT_EQ(after["result"], before["result"]);

  const auto fresh = wait_for(c, submit(c, id));
  EXPECT_EQ(fresh["graph_version"], 2);
  EXPECT_EQ(fresh["result"]["configurations"].size(), 2u);
}

TEST(Service, PerspectiveAndBudgetAreApplied) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("star.json"));
  auto job = wait_for(c, submit(c, id, {{"perspective", "Industry"}}));
  EXPECT_EQ(job["result"]["perspective"], "Industry");
  EXPECT_EQ(job["result"]["configurations"][0]["score"], 2.0);  // a Easy + b Easy

  job = wait_for(c, submit(c, id, {{"budget", {{"max_configs", 1}}}}));
  EXPECT_EQ(job["result"]["truncated"], true);
  EXPECT_EQ(job["result"]["truncation_reason"], "max_configs");

  auto r = c.Post("/graphs/" + id + "/analyses", R"({"perspective":"Nobody"})", "application/json");
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body_of(r)["error"]["path"], "perspective");
}

TEST(Service, CancellationAndWorkerLimit) {
  ServiceConfig config;
  config.max_jobs = 1;
  Running server(config);
  auto c = server.client();
  const auto id = create(c, huge_fan());
  const json budget = {{"budget", {{"max_configs", 1000000000}, {"max_time_ms", 60000}}}};
  const auto first = submit(c, id, budget);
  const auto second = submit(c, id, budget);

  for (int i = 0; i < 2000 && body_of(c.Get("/analyses/" + first))["status"] != "running"; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  EXPECT_EQ(body_of(c.Get("/analyses/" + first))["status"], "running");
  EXPECT_EQ(body_of(c.Get("/analyses/" + second))["status"], "queued");

  auto r = c.Delete("/analyses/" + second);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body_of(r)["status"], "cancelled");
  r = c.Delete("/analyses/" + first);
  ASSERT_EQ(r->status, 200);
  const auto done = wait_for(c, first);
  EXPECT_EQ(done["status"], "cancelled");
  EXPECT_TRUE(done["result"].is_null());
  EXPECT_GT(done["progress"].get<std::size_t>(), 0u);
  EXPECT_EQ(c.Get("/analyses/" + first + "/report")->status, 409);

  const auto quick = wait_for(c, submit(c, create(c, fixture("path.json"))));
  EXPECT_EQ(c.Delete("/analyses/" + quick["id"].get<std::string>())->status, 409);
}

TEST(Service, RestartKeepsGraphsAndReports) {
  const auto dir = fresh_dir();
  ServiceConfig config;
  config.data_dir = dir;
  std::string id, job, report, listing, graph_doc;
  {
    Running server(config);
    auto c = server.client();
    id = create(c, fixture("star.json"));
    ASSERT_EQ(c.Put("/graphs/" + id, {{"If-Match", "1"}}, fixture("star.json"), "application/json")->status,
              200);
    create(c, fixture("path.json"));
    job = submit(c, id);
    wait_for(c, job);
    report = c.Get("/analyses/" + job + "/report")->body;
    listing = c.Get("/graphs")->body;
    graph_doc = c.Get("/graphs/" + id)->body;
  }
  {
    Running server(config);
    auto c = server.client();
    EXPECT_EQ(c.Get("/graphs")->body, listing);
    EXPECT_EQ(c.Get("/graphs/" + id)->body, graph_doc);
    EXPECT_EQ(c.Get("/analyses/" + job + "/report")->body, report);
    EXPECT_EQ(body_of(c.Get("/analyses/" + job))["status"], "done");
    // Identifiers keep counting up rather than reusing old ones.
    EXPECT_NE(create(c, fixture("path.json")), id);
    EXPECT_NE(submit(c, id), job);
  }
  fs::remove_all(dir);
}

TEST(Service, BearerToken) {
  ServiceConfig config;
  config.token = "sesame";
  Running server(config);
  auto c = server.client();
  EXPECT_EQ(c.Get("/graphs")->status, 200);

  c.set_bearer_token_auth("wrong");
  auto r = c.Get("/graphs");
  EXPECT_EQ(r->status, 401);
  EXPECT_EQ(r->get_header_value(kSchemaHeader), "1");
  EXPECT_EQ(body_of(r)["error"]["code"], "UNAUTHORIZED");
}

TEST(Service, Dynamics) {
  Running server({});
  auto c = server.client();
  const auto id = create(c, fixture("cycle.json"));
  auto r = c.Post("/graphs/" + id + "/dynamics", R"({"mapping":"sigmoid"})", "application/json");
  ASSERT_EQ(r->status, 200);
  auto body = body_of(r);
  EXPECT_TRUE(body["trajectory"]["converged"].get<bool>());
  const double oracle = testing::sigmoid_fixed_point_bisection(0.5);
  EXPECT_NEAR(body["trajectory"]["fixed_point"]["values"]["a"].get<double>(), oracle, 1e-6);
  EXPECT_EQ(body["ranking"], json::array({"a", "b"}));

  r = c.Post("/graphs/" + id + "/dynamics", R"({"mapping":"linear","max_iter":5000000,"x0":{"a":0.25}})",
             "application/json");
  ASSERT_EQ(r->status, 200);
  body = body_of(r);
  EXPECT_EQ(body["max_iter"], kMaxDynamicsIterations);
  EXPECT_EQ(body["trajectory"]["states"][0]["values"]["a"], 0.25);
  EXPECT_EQ(body["trajectory"]["states"][0]["values"]["b"], 1.0);

  r = c.Post("/graphs/" + id + "/dynamics", R"({"mapping":"cubic"})", "application/json");
  EXPECT_EQ(r->status, 422);
  r = c.Post("/graphs/" + id + "/dynamics", R"({"x0":{"zz":1}})", "application/json");
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body_of(r)["error"]["path"], "x0.zz");
}

TEST(Service, Comparisons) {
  Running server({});
  auto c = server.client();
  const auto star = json::parse(fixture("star.json"));
  auto r = c.Post("/compare/perspectives",
                  json{{"graph", star}, {"p1", "Local authority"}, {"p2", "Industry"}}.dump(),
                  "application/json");
  ASSERT_EQ(r->status, 200);
  auto body = body_of(r);
  EXPECT_EQ(body["disagreements"].size(), 2u);

  const auto star_id = create(c, fixture("star.json"));
  const auto path_id = create(c, fixture("path.json"));
  const auto a = submit(c, star_id);
  const auto b = submit(c, path_id);
  wait_for(c, a);
  wait_for(c, b);
  const auto inline_report = json::parse(c.Get("/analyses/" + b + "/report")->body);
  r = c.Post("/compare/scenarios", json{{"analysisA", a}, {"analysisB", inline_report}}.dump(),
             "application/json");
  ASSERT_EQ(r->status, 200);
  body = body_of(r);
  EXPECT_EQ(body["only_first"], json::array({"b", "c"}));
  EXPECT_EQ(body["shared"], json::array({"a"}));

  r = c.Post("/compare/scenarios", R"({"analysisA":"j999"})", "application/json");
  EXPECT_EQ(r->status, 404);
}

}  // namespace
}  // namespace levers::service
