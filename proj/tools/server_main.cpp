// srlkit-server: HTTP front end for the session service.

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "srl/error.hpp"
#include "srl/http_server.hpp"
#include "srl/service.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning session service"};
  std::string config_path;
  std::optional<int> port;
  app.add_option("--config", config_path, "Service config JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--port", port, "Override the configured port; 0 picks a free one")->check(CLI::Range(0, 65535));
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = srl::load_service_config(config_path);
    auto service = srl::SessionService::from_config(cfg);
    srl::HttpServer server(*service);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int bound = server.start(cfg.host, port.value_or(cfg.port));
    std::cout << "listening on " << cfg.host << ":" << bound << " (" << service->session_ids().size()
              << " sessions recovered)" << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const srl::Error& e) {
    std::cerr << srl::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
