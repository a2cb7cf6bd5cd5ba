#include <csignal>
#include <iostream>

#include "levers/service/server.hpp"

namespace {

levers::service::Service* running = nullptr;

void handle_signal(int) {
  if (running) running->stop();
}

}  // namespace

int main() {
  try {
    auto config = levers::service::ServiceConfig::from_environment();
    levers::service::Service service(config);
    if (service.bind("0.0.0.0", config.port) < 0) {
      std::cerr << "levers-server: cannot bind port " << config.port << "\n";
      return 1;
    }
    if (config.token.empty()) {
      std::cerr << "levers-server: LEVERS_TOKEN is not set, requests are not authenticated\n";
    }
    std::cerr << "levers-server: listening on port " << config.port << ", data in "
              << config.data_dir.string() << ", " << service.jobs().max_jobs()
              << " analysis workers\n";
    running = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    service.run();
    running = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "levers-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
