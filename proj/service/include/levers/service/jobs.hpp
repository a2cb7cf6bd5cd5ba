#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "levers/fcm.hpp"
#include "levers/service/store.hpp"

namespace levers::service {

enum class CancelOutcome { NotFound, Cancelled, AlreadyFinished };

/// Runs analyses on a fixed pool of workers. A job holds the graph snapshot
/// it was submitted with, so later edits never reach it; terminal jobs are
/// written through the store.
class JobManager {
 public:
  /// `max_jobs` = 0 uses the hardware concurrency.
  JobManager(GraphStore& store, unsigned max_jobs);
  ~JobManager();

  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  JobRecord submit(const StoredGraph& graph, const Budget& budget,
                   std::optional<Perspective> perspective);
  std::optional<JobRecord> get(const std::string& id) const;
  std::pair<CancelOutcome, JobRecord> cancel(const std::string& id);

  unsigned max_jobs() const { return static_cast<unsigned>(workers_.size()); }

 private:
  struct Job;

  void work();
  void run(Job& job);
  static JobRecord snapshot(const Job& job);

  GraphStore& store_;
  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace levers::service
