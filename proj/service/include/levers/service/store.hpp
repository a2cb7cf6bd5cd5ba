#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "levers/controllability.hpp"
#include "levers/fcm.hpp"

namespace levers::service {

struct StoredGraph {
  std::string id;
  std::uint64_t version = 0;
  std::string created_at;
  std::string updated_at;
  std::shared_ptr<const FcmGraph> graph;
};

enum class WriteStatus { Ok, NotFound, Conflict };

struct WriteResult {
  WriteStatus status = WriteStatus::Ok;
  // The stored state after the call: the new version on Ok, the current one
  // on Conflict.
  StoredGraph stored;
};

/// Terminal analysis job as kept on disk. `report` holds the exact bytes
/// served to clients and is only set for status "done".
struct JobRecord {
  std::string id;
  std::string graph_id;
  std::uint64_t graph_version = 0;
  std::string status;
  Budget budget;
  std::string perspective;
  std::size_t progress = 0;
  std::string error;
  std::string created_at;
  std::string finished_at;
  std::shared_ptr<const std::string> report;
};

/// Versioned graph documents and finished reports. With a data directory,
/// every write lands on disk before the call returns and a new store over
/// the same directory sees the same state; without one it is memory only.
class GraphStore {
 public:
  explicit GraphStore(std::filesystem::path data_dir = {});

  StoredGraph create(FcmGraph graph);
  std::optional<StoredGraph> get(const std::string& id) const;
  std::vector<StoredGraph> list() const;
  /// Replaces the document only when `expected_version` is current.
  WriteResult update(const std::string& id, std::uint64_t expected_version, FcmGraph graph);
  bool remove(const std::string& id);

  std::string next_job_id();
  void save_job(const JobRecord& job);
  std::vector<JobRecord> jobs() const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  void load();
  void write_index() const;
  std::filesystem::path graph_path(const std::string& id) const;
  std::filesystem::path report_path(const std::string& id) const;

  std::filesystem::path data_dir_;
  mutable std::shared_mutex mutex_;
  std::vector<StoredGraph> graphs_;  // ordered by creation
  std::vector<JobRecord> jobs_;
  std::uint64_t next_graph_ = 1;
  std::uint64_t next_job_ = 1;
};

/// Current UTC time as 2024-05-01T12:00:00.123Z.
std::string utc_timestamp();

}  // namespace levers::service
