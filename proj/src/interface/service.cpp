#include "pmd/interface/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include "pmd/error.hpp"
#include "pmd/interface/documents.hpp"
#include "pmd/json_io.hpp"

namespace pmd::interface {

using nlohmann::json;

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kSyntaxError:
    case ErrorCode::kValidationError:
    case ErrorCode::kUnknownParameter:
    case ErrorCode::kValueNotInDomain:
    case ErrorCode::kMalformedDocument:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kOutOfBounds:
    case ErrorCode::kOutOfGrid:
    case ErrorCode::kAssignmentMismatch:
      return 400;
    default:
      return 500;
  }
}

std::string error_body(std::string_view code, std::string_view message, std::string_view detail) {
  json j = {{"code", code}, {"message", message}, {"detail", nullptr}};
  if (!detail.empty()) {
    const json d = json::parse(detail, nullptr, false);
    j["detail"] = d.is_discarded() ? json(detail) : d;
  }
  return j.dump();
}

namespace {

json request_body(std::string_view body) {
  if (body.empty()) return json::object();
  json j = json_io::parse(body, "request");
  if (!j.is_object()) throw Error(ErrorCode::kMalformedDocument, "request body must be an object");
  return j;
}

dsl::Assignment assignment_of(const json& req) {
  if (!req.contains("assignment") || req["assignment"].is_null()) return {};
  try {
    return req["assignment"].get<dsl::Assignment>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kMalformedDocument, "assignment must map names to strings");
  }
}

geo::LocalPoint point_or(const json& req, const char* key, geo::LocalPoint fallback) {
  if (!req.contains(key) || req[key].is_null()) return fallback;
  try {
    return {req[key].at("east").get<double>(), req[key].at("north").get<double>()};
  } catch (const json::exception&) {
    throw Error(ErrorCode::kMalformedDocument, std::string(key) + " must be {east, north}");
  }
}

ceo::Problem problem_for(const Engine& engine, const json& req) {
  auto p = engine.problem();
  p.start = point_or(req, "start", p.start);
  p.goal = point_or(req, "goal", p.goal);
  return p;
}

Response ok(std::string body) { return {200, std::move(body)}; }

}  // namespace

Response Service::handle(std::string_view method, std::string_view path,
                         std::string_view body) const {
  const Engine& e = *engine_;
  try {
    if (path == "/api/scenario") {
      if (method != "GET") return {405, error_body("MethodNotAllowed", "use GET")};
      return ok(e.summary_json());
    }
    const bool known = path == "/api/pml" || path == "/api/plan" || path == "/api/clearance" ||
                       path == "/api/explain" || path == "/api/optimize";
    if (!known) return {404, error_body("NotFound", "no such endpoint", path)};
    if (method != "POST") return {405, error_body("MethodNotAllowed", "use POST")};

    const json req = request_body(body);
    if (path == "/api/pml") {
      const auto a = ceo::complete_assignment(e.program(), assignment_of(req));
      return ok(e.pml(a)->to_json());
    }
    if (path == "/api/plan") {
      const auto outcome = ceo::plan(problem_for(e, req), assignment_of(req));
      if (!outcome.error.empty()) {
        return {500, error_body(outcome.error_code, outcome.error)};
      }
      const std::string doc = ceo::plan_document(outcome, e.scenario().t_j);
      if (!outcome.feasible()) return {422, error_body("Infeasible", "no valid path", doc)};
      return ok(doc);
    }
    if (path == "/api/clearance") {
      const auto a = ceo::complete_assignment(e.program(), assignment_of(req));
      if (!req.contains("path")) throw Error(ErrorCode::kValidationError, "path is required");
      const auto pml = e.pml(a);
      const auto mission = mission_from_json(req["path"], a);
      return ok(ceo::verdict_document(ceo::clearance(mission, *pml, e.scenario().t_j), *pml));
    }
    if (path == "/api/explain") {
      const std::string mode_text = req.value("mode", std::string("oat"));
      const auto mode = ceo::parse_mode(mode_text);
      if (!mode) throw Error(ErrorCode::kValidationError, "unknown mode '" + mode_text + "'");
      const auto proposed = req.contains("assignment") ? assignment_of(req) : e.proposed();
      return ok(ceo::explain(problem_for(e, req), proposed, *mode).to_json());
    }
    // /api/optimize
    return ok(ceo::optimize(problem_for(e, req)).to_json());
  } catch (const Error& err) {
    return {status_for(err.code()), error_body(to_string(err.code()), err.what())};
  } catch (const std::exception& err) {
    return {500, error_body("InternalError", err.what())};
  }
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
  const auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(R"(/api/.*)", bridge);
  impl_->server.Post(R"(/api/.*)", bridge);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace pmd::interface
