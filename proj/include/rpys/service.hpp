#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

#include "rpys/session.hpp"

namespace rpys {

enum class ApiErrorCode { BadRequest, NotFound, Conflict, Internal };

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct ServiceOptions {
  // New datasets are written through to <data_dir>/<id>.session.json.
  std::optional<std::filesystem::path> data_dir;
  // Value for Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin;
  SessionConfig default_config;
};

// In-memory dataset store behind the JSON API. Reads of one dataset run
// concurrently; mutations of one dataset are serialized; datasets are
// independent of each other.
class ApiService {
 public:
  explicit ApiService(ServiceOptions options = {});

  // Registers an existing session; mutations are written through to
  // backing_file when given.
  std::string add_dataset(SessionSnapshot snapshot, std::optional<std::filesystem::path> backing_file = std::nullopt);

  std::shared_ptr<const SessionSnapshot> snapshot(const std::string& dataset_id) const;

  ApiResponse handle(const ApiRequest& request);

 private:
  struct Dataset {
    std::mutex write_mutex;
    mutable std::mutex read_mutex;
    std::shared_ptr<const SessionSnapshot> current;
    std::optional<std::filesystem::path> file;

    std::shared_ptr<const SessionSnapshot> get() const {
      std::lock_guard lock(read_mutex);
      return current;
    }
  };

  std::shared_ptr<Dataset> find(const std::string& id) const;
  ApiResponse route(const ApiRequest& request);

  ApiResponse create_dataset(const ApiRequest& request);
  ApiResponse post_decision(Dataset& ds, const ApiRequest& request);

  ServiceOptions options_;
  mutable std::shared_mutex datasets_mutex_;
  std::map<std::string, std::shared_ptr<Dataset>> datasets_;
  std::atomic<long> next_id_{1};
};

// Binds the service to an HTTP/1.1 listener on a background thread.
class HttpServer {
 public:
  explicit HttpServer(ApiService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error(Io) on failure.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from elsewhere.
  void listen_blocking(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rpys
