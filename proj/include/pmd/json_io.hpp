#pragma once

// Shared pieces of the JSON documents. Internal to the library and tools.

#include <json.hpp>

#include "pmd/uncertainty/grid.hpp"

namespace pmd::json_io {

nlohmann::json grid_to_json(const Grid& grid);
/// Throws Error(kMalformedDocument) on missing or mistyped members.
Grid grid_from_json(const nlohmann::json& j);

/// Parses `text`, mapping parse errors to Error(kMalformedDocument) with
/// `what` as the document name.
nlohmann::json parse(std::string_view text, const std::string& what);

}  // namespace pmd::json_io
