#include "levers/service/jobs.hpp"

#include <atomic>

#include "levers/decision.hpp"
#include "levers/io.hpp"

namespace levers::service {

struct JobManager::Job {
  JobRecord record;  // guarded by the manager mutex
  std::shared_ptr<const FcmGraph> graph;
  std::optional<Perspective> perspective;
  CancellationToken token;
  std::atomic<std::size_t> progress{0};
};

JobManager::JobManager(GraphStore& store, unsigned max_jobs) : store_(store) {
  for (auto& record : store_.jobs()) {
    auto job = std::make_shared<Job>();
    job->progress = record.progress;
    job->record = std::move(record);
    jobs_.emplace(job->record.id, std::move(job));
  }
  if (max_jobs == 0) max_jobs = std::max(1u, std::thread::hardware_concurrency());
  for (unsigned i = 0; i < max_jobs; ++i) workers_.emplace_back([this] { work(); });
}

JobManager::~JobManager() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    for (auto& [id, job] : jobs_) job->token.cancel();
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
}

JobRecord JobManager::snapshot(const Job& job) {
  auto out = job.record;
  out.progress = job.progress.load();
  return out;
}

JobRecord JobManager::submit(const StoredGraph& graph, const Budget& budget,
                             std::optional<Perspective> perspective) {
  auto job = std::make_shared<Job>();
  job->record.id = store_.next_job_id();
  job->record.graph_id = graph.id;
  job->record.graph_version = graph.version;
  job->record.status = "queued";
  job->record.budget = budget;
  job->record.perspective = perspective ? perspective->label : std::string{};
  job->record.created_at = utc_timestamp();
  job->graph = graph.graph;
  job->perspective = std::move(perspective);

  std::lock_guard lock(mutex_);
  jobs_.emplace(job->record.id, job);
  queue_.push_back(job);
  wake_.notify_one();
  return snapshot(*job);
}

std::optional<JobRecord> JobManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return snapshot(*it->second);
}

std::pair<CancelOutcome, JobRecord> JobManager::cancel(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return {CancelOutcome::NotFound, {}};
  auto& job = *it->second;
  const auto& status = job.record.status;
  if (status == "done" || status == "failed") {
    return {CancelOutcome::AlreadyFinished, snapshot(job)};
  }
  job.token.cancel();
  if (status == "queued") {
    job.record.status = "cancelled";
    job.record.finished_at = utc_timestamp();
    const auto record = snapshot(job);
    lock.unlock();
    store_.save_job(record);
    return {CancelOutcome::Cancelled, record};
  }
  // A running job notices the token within a few dozen candidates; report it
  // as cancelled straight away, the worker will not overwrite the status.
  job.record.status = "cancelled";
  return {CancelOutcome::Cancelled, snapshot(job)};
}

void JobManager::work() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      if (job->record.status != "queued") continue;
      job->record.status = "running";
    }
    run(*job);
  }
}

void JobManager::run(Job& job) {
  EnumerationOptions options;
  options.budget = job.record.budget;
  options.cancellation = job.token;
  options.on_progress = [&job](std::size_t tested) { job.progress = tested; };

  std::shared_ptr<const std::string> bytes;
  std::string error;
  std::size_t tested = 0;
  try {
    const auto report = analyze(*job.graph, options, job.perspective ? &*job.perspective : nullptr);
    tested = report.candidates_tested;
    bytes = std::make_shared<const std::string>(serialize_report(report));
  } catch (const std::exception& e) {
    error = e.what();
  }

  JobRecord record;
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && job.record.status == "running") return;  // left unfinished
    if (job.record.status != "cancelled") {
      if (bytes) {
        job.record.status = "done";
        job.record.report = std::move(bytes);
        job.progress = tested;
      } else {
        job.record.status = "failed";
        job.record.error = error;
      }
    }
    job.record.finished_at = utc_timestamp();
    record = snapshot(job);
  }
  store_.save_job(record);
}

}  // namespace levers::service
