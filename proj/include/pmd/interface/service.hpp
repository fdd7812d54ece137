#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "pmd/error.hpp"
#include "pmd/interface/scenario.hpp"

namespace pmd::interface {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

/// HTTP status for an engine error: 400 for bad requests, 500 otherwise.
int status_for(ErrorCode code) noexcept;
/// `{"code", "message", "detail"}`.
std::string error_body(std::string_view code, std::string_view message,
                       std::string_view detail = {});

/// Request handling over one loaded scenario. Stateless apart from the
/// engine's landscape cache, so handle() may be called concurrently.
///
///   GET  /api/scenario
///   POST /api/pml        {assignment}
///   POST /api/plan       {assignment, start, goal}
///   POST /api/clearance  {assignment, path}
///   POST /api/explain    {assignment, start, goal, mode}
///   POST /api/optimize   {start, goal}
///
/// Missing members default to the scenario's values. An infeasible plan
/// answers 422 with the plan document as `detail`.
class Service {
 public:
  explicit Service(std::shared_ptr<const Engine> engine) : engine_(std::move(engine)) {}

  Response handle(std::string_view method, std::string_view path, std::string_view body) const;

  const Engine& engine() const noexcept { return *engine_; }

 private:
  std::shared_ptr<const Engine> engine_;
};

/// HTTP transport for a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();

  /// Binds host:port (port 0 picks a free one); returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the server failed.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pmd::interface
