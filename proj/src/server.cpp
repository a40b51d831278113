#include "safetydash/server.hpp"

#include "httplib.h"

#include <mutex>
#include <ostream>

namespace safetydash {

namespace {

std::mutex g_log_mu;

Params to_params(const httplib::Request& req)
{
  Params p;
  for (const auto& [k, v] : req.params) p[k] = v;  // last value wins for repeated keys
  return p;
}

bool is_loopback(const std::string& addr) { return addr == "127.0.0.1" || addr == "::1" || addr == "::ffff:127.0.0.1"; }

}  // namespace

ApiServer::ApiServer(Api& api, std::ostream* log) : api_(api), log_(log), server_(std::make_unique<httplib::Server>())
{
  // httplib's default adds SO_REUSEPORT, which lets a second server share a busy port.
  server_->set_socket_options([](int sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  auto cors = [this](const httplib::Request& req, httplib::Response& res) {
    const auto allowed = api_.allowed_origin(req.get_header_value("Origin"));
    if (!allowed.empty()) {
      res.set_header("Access-Control-Allow-Origin", allowed);
      res.set_header("Vary", "Origin");
    }
  };

  server_->Get(R"(/.*)", [this, cors](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = api_.get(req.path, to_params(req));
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    cors(req, res);
  });

  server_->Options(R"(/.*)", [this, cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server_->Post("/admin/reload", [this](const httplib::Request& req, httplib::Response& res) {
    if (!api_.options().enable_reload || !is_loopback(req.remote_addr)) {
      res.status = 404;
      res.set_content(error_json(404, "not_found", "no route /admin/reload").dump(), "application/json");
      return;
    }
    const ApiResponse r = api_.reload();
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  server_->set_logger([this](const httplib::Request& req, const httplib::Response& res) {
    if (!log_) return;
    std::string target = req.path;
    if (!req.params.empty()) {
      target += '?';
      bool first = true;
      for (const auto& [k, v] : req.params) {
        if (!first) target += '&';
        first = false;
        target += k + "=" + v;
      }
    }
    std::lock_guard lock(g_log_mu);
    *log_ << req.remote_addr << ' ' << req.method << ' ' << target << ' ' << res.status << ' ' << res.body.size()
          << std::endl;
  });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port)
{
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::stop()
{
  if (server_ && server_->is_running()) server_->stop();
}

bool ApiServer::running() const { return server_->is_running(); }

}  // namespace safetydash
