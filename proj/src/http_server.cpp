#include <httplib.h>

#include <spdlog/spdlog.h>

#include "wildfire/service.hpp"

namespace wildfire {

struct HttpServer::Impl {
  FireService& service;
  httplib::Server server;

  explicit Impl(FireService& s) : service(s) {}
};

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  const bool geo = r.status == 200 && r.body.is_object() &&
                   (r.body.value("type", "") == "FeatureCollection" || r.body.value("type", "") == "Feature");
  res.set_content(r.body.dump(), geo ? "application/geo+json" : "application/json");
}

}  // namespace

HttpServer::HttpServer(FireService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  auto& svc = impl_->service;

  svr.set_default_headers({{"Access-Control-Allow-Origin", svc.config().cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  svr.Get("/fires", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.list_fires()); });
  svr.Post("/fires", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.create_fire(req.body));
  });
  svr.Get(R"(/fires/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_fire(req.matches[1]));
  });
  svr.Post(R"(/fires/([^/]+)/ignite)", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.ignite(req.matches[1]));
  });
  svr.Post(R"(/fires/([^/]+)/stop)", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.stop(req.matches[1]));
  });
  svr.Delete(R"(/fires/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.remove(req.matches[1]));
  });
  svr.Post("/route", [&svc](const httplib::Request& req, httplib::Response& res) { send(res, svc.route(req.body)); });

  svr.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    spdlog::error("{} {} failed: {}", req.method, req.path, what);
    res.status = 500;
    res.set_content(nlohmann::json{{"error", what}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace wildfire
