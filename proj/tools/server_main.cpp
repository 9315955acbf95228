#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "wildfire/service.hpp"

namespace {
wildfire::HttpServer* g_server = nullptr;
}

int main(int argc, char** argv) {
  CLI::App app{"Wildfire evacuation service"};
  std::string config_path;
  app.add_option("--config", config_path, "service config JSON (env vars override)");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = wildfire::ServiceConfig::load(config_path.empty() ? std::nullopt
                                                                    : std::optional<std::filesystem::path>(config_path));
    auto service = wildfire::FireService::from_config(config);
    wildfire::HttpServer server(*service);

    const auto colon = config.bind_addr.rfind(':');
    const std::string host = colon == std::string::npos ? config.bind_addr : config.bind_addr.substr(0, colon);
    const int port = colon == std::string::npos ? 8080 : std::stoi(config.bind_addr.substr(colon + 1));
    const int bound = server.bind(host, port);
    if (bound < 0) {
      spdlog::error("cannot bind {}", config.bind_addr);
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    spdlog::info("listening on {}:{}", host, bound);
    server.serve();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
