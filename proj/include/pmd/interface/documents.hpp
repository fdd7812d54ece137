#pragma once

#include <json.hpp>

#include "pmd/ceo/ceo.hpp"

namespace pmd::interface {

/// Mission from a plan document (`{"path": {"via_points": [...]}}`), a path
/// document (`{"via_points": [...]}`) or a bare via-point array. Each point
/// is `{east, north}` with optional `yaw` and `labels`.
/// Throws Error(kMalformedDocument).
ceo::Mission mission_from_json(const nlohmann::json& doc, const dsl::Assignment& assignment);

}  // namespace pmd::interface
