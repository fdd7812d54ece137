#include "pmd/json_io.hpp"

#include "pmd/error.hpp"

namespace pmd::json_io {

using nlohmann::json;

json grid_to_json(const Grid& grid) {
  return {{"origin", {{"lat", grid.origin.lat}, {"lon", grid.origin.lon}}},
          {"width_cells", grid.width_cells},
          {"height_cells", grid.height_cells},
          {"cell_size", grid.cell_size}};
}

Grid grid_from_json(const json& j) {
  try {
    Grid g;
    g.origin = {j.at("origin").at("lat").get<double>(), j.at("origin").at("lon").get<double>()};
    g.width_cells = j.at("width_cells").get<std::size_t>();
    g.height_cells = j.at("height_cells").get<std::size_t>();
    g.cell_size = j.at("cell_size").get<double>();
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("grid: ") + e.what());
  }
}

json parse(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, what + ": " + e.what());
  }
}

}  // namespace pmd::json_io
