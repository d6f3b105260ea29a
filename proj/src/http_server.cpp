#include <httplib.h>

#include "rpys/error.hpp"
#include "rpys/service.hpp"

namespace rpys {

struct HttpServer::Impl {
  explicit Impl(ApiService& service) : service(service) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest request{req.method, req.path, {}, req.body};
      for (const auto& [key, value] : req.params) request.query.emplace(key, value);
      const ApiResponse r = this->service.handle(request);
      res.status = r.status;
      for (const auto& [key, value] : r.headers) res.set_header(key, value);
      if (!r.content_type.empty()) res.set_content(r.body, r.content_type);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Options(".*", forward);
  }

  ApiService& service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(ApiService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::listen_blocking(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rpys
