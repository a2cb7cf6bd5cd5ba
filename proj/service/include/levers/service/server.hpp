#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "levers/service/jobs.hpp"
#include "levers/service/store.hpp"

namespace httplib {
class Server;
}

namespace levers::service {

inline constexpr const char* kSchemaHeader = "X-Levers-Schema-Version";
inline constexpr std::size_t kMaxDynamicsIterations = 100000;

struct ServiceConfig {
  std::filesystem::path data_dir;  // empty keeps everything in memory
  std::string token;               // empty disables authentication
  unsigned max_jobs = 0;
  int port = 8080;

  /// Reads LEVERS_DATA_DIR, LEVERS_TOKEN, LEVERS_MAX_JOBS and LEVERS_PORT.
  static ServiceConfig from_environment();
};

/// Graph store, job runner and the HTTP routes over them.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to `host`; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

  GraphStore& store() { return store_; }
  JobManager& jobs() { return jobs_; }
  const ServiceConfig& config() const { return config_; }

 private:
  void install_routes();

  ServiceConfig config_;
  GraphStore store_;
  JobManager jobs_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace levers::service
