#include "pmd/interface/documents.hpp"

#include "pmd/error.hpp"

namespace pmd::interface {

using nlohmann::json;

ceo::Mission mission_from_json(const json& doc, const dsl::Assignment& assignment) {
  const json* points = &doc;
  if (doc.is_object() && doc.contains("path") && doc["path"].is_object()) points = &doc["path"];
  if (points->is_object() && points->contains("via_points")) points = &(*points)["via_points"];
  if (!points->is_array()) {
    throw Error(ErrorCode::kMalformedDocument, "path: expected via_points");
  }
  ceo::Mission m;
  m.assignment = assignment;
  try {
    for (const auto& p : *points) {
      ceo::ViaPoint v;
      v.position = {p.at("east").get<double>(), p.at("north").get<double>()};
      v.yaw = p.value("yaw", 0.0);
      if (p.contains("labels")) v.labels = p["labels"].get<dsl::Assignment>();
      m.via_points.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("path: ") + e.what());
  }
  return m;
}

}  // namespace pmd::interface
