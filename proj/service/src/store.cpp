#include "levers/service/store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <nlohmann/json.hpp>

#include "levers/errors.hpp"
#include "levers/io.hpp"

namespace levers::service {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto seconds = std::chrono::system_clock::to_time_t(now);
  const auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                          now.time_since_epoch()).count() % 1000;
  std::tm parts{};
  gmtime_r(&seconds, &parts);
  char buffer[40];
  const auto n = std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%S", &parts);
  std::snprintf(buffer + n, sizeof buffer - n, ".%03dZ", static_cast<int>(millis));
  return buffer;
}

namespace {

json budget_to_json(const Budget& budget) {
  return {{"max_configs", budget.max_configs}, {"max_time_ms", budget.max_time.count()}};
}

Budget budget_from_json(const json& document) {
  Budget budget;
  budget.max_configs = document.at("max_configs").get<std::size_t>();
  budget.max_time = std::chrono::milliseconds(document.at("max_time_ms").get<std::int64_t>());
  return budget;
}

}  // namespace

GraphStore::GraphStore(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
  if (data_dir_.empty()) return;
  std::filesystem::create_directories(data_dir_ / "graphs");
  std::filesystem::create_directories(data_dir_ / "reports");
  load();
}

std::filesystem::path GraphStore::graph_path(const std::string& id) const {
  return data_dir_ / "graphs" / (id + ".json");
}

std::filesystem::path GraphStore::report_path(const std::string& id) const {
  return data_dir_ / "reports" / (id + ".json");
}

void GraphStore::load() {
  const auto index_path = data_dir_ / "index.json";
  if (!std::filesystem::exists(index_path)) return;
  const auto index = json::parse(read_file(index_path));
  next_graph_ = index.at("next_graph").get<std::uint64_t>();
  next_job_ = index.at("next_job").get<std::uint64_t>();
  for (const auto& entry : index.at("graphs")) {
    StoredGraph g;
    g.id = entry.at("id").get<std::string>();
    g.version = entry.at("version").get<std::uint64_t>();
    g.created_at = entry.at("created_at").get<std::string>();
    g.updated_at = entry.at("updated_at").get<std::string>();
    g.graph = std::make_shared<const FcmGraph>(parse_graph(read_file(graph_path(g.id))));
    graphs_.push_back(std::move(g));
  }
  for (const auto& entry : index.at("jobs")) {
    JobRecord job;
    job.id = entry.at("id").get<std::string>();
    job.graph_id = entry.at("graph_id").get<std::string>();
    job.graph_version = entry.at("graph_version").get<std::uint64_t>();
    job.status = entry.at("status").get<std::string>();
    job.budget = budget_from_json(entry.at("budget"));
    job.perspective = entry.at("perspective").get<std::string>();
    job.progress = entry.at("progress").get<std::size_t>();
    job.error = entry.at("error").get<std::string>();
    job.created_at = entry.at("created_at").get<std::string>();
    job.finished_at = entry.at("finished_at").get<std::string>();
    if (job.status == "done") {
      job.report = std::make_shared<const std::string>(read_file(report_path(job.id)));
    }
    jobs_.push_back(std::move(job));
  }
}

void GraphStore::write_index() const {
  if (data_dir_.empty()) return;
  json graphs = json::array();
  for (const auto& g : graphs_) {
    graphs.push_back({{"id", g.id},
                      {"version", g.version},
                      {"created_at", g.created_at},
                      {"updated_at", g.updated_at}});
  }
  json jobs = json::array();
  for (const auto& j : jobs_) {
    jobs.push_back({{"id", j.id},
                    {"graph_id", j.graph_id},
                    {"graph_version", j.graph_version},
                    {"status", j.status},
                    {"budget", budget_to_json(j.budget)},
                    {"perspective", j.perspective},
                    {"progress", j.progress},
                    {"error", j.error},
                    {"created_at", j.created_at},
                    {"finished_at", j.finished_at}});
  }
  const json index{{"next_graph", next_graph_},
                   {"next_job", next_job_},
                   {"graphs", std::move(graphs)},
                   {"jobs", std::move(jobs)}};
  write_file(data_dir_ / "index.json", index.dump(2) + "\n");
}

StoredGraph GraphStore::create(FcmGraph graph) {
  std::unique_lock lock(mutex_);
  StoredGraph g;
  g.id = "g" + std::to_string(next_graph_++);
  g.version = 1;
  g.created_at = g.updated_at = utc_timestamp();
  g.graph = std::make_shared<const FcmGraph>(std::move(graph));
  if (!data_dir_.empty()) write_file(graph_path(g.id), serialize_graph(*g.graph));
  graphs_.push_back(g);
  write_index();
  return g;
}

std::optional<StoredGraph> GraphStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = std::ranges::find(graphs_, id, &StoredGraph::id);
  if (it == graphs_.end()) return std::nullopt;
  return *it;
}

std::vector<StoredGraph> GraphStore::list() const {
  std::shared_lock lock(mutex_);
  return graphs_;
}

WriteResult GraphStore::update(const std::string& id, std::uint64_t expected_version,
                               FcmGraph graph) {
  std::unique_lock lock(mutex_);
  auto it = std::ranges::find(graphs_, id, &StoredGraph::id);
  if (it == graphs_.end()) return {WriteStatus::NotFound, {}};
  if (it->version != expected_version) return {WriteStatus::Conflict, *it};
  auto next = *it;
  next.version += 1;
  next.updated_at = utc_timestamp();
  next.graph = std::make_shared<const FcmGraph>(std::move(graph));
  if (!data_dir_.empty()) write_file(graph_path(id), serialize_graph(*next.graph));
  *it = next;
  write_index();
  return {WriteStatus::Ok, next};
}

bool GraphStore::remove(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto it = std::ranges::find(graphs_, id, &StoredGraph::id);
  if (it == graphs_.end()) return false;
  graphs_.erase(it);
  write_index();
  if (!data_dir_.empty()) std::filesystem::remove(graph_path(id));
  return true;
}

std::string GraphStore::next_job_id() {
  std::unique_lock lock(mutex_);
  const auto id = "j" + std::to_string(next_job_++);
  write_index();
  return id;
}

void GraphStore::save_job(const JobRecord& job) {
  std::unique_lock lock(mutex_);
  if (!data_dir_.empty() && job.report) write_file(report_path(job.id), *job.report);
  auto it = std::ranges::find(jobs_, job.id, &JobRecord::id);
  if (it == jobs_.end()) {
    jobs_.push_back(job);
  } else {
    *it = job;
  }
  write_index();
}

std::vector<JobRecord> GraphStore::jobs() const {
  std::shared_lock lock(mutex_);
  return jobs_;
}

}  // namespace levers::service
