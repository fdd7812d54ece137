#include "pmd/uncertainty/relations.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <cmath>
#include <limits>
#include <thread>

#include <json.hpp>

#include "pmd/json_io.hpp"
#include "pmd/digest.hpp"
#include "pmd/error.hpp"

namespace pmd {

using nlohmann::json;

void AffineNoiseModel::check() const {
  const auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(cov_ee) || bad(cov_en) || bad(cov_nn) || bad(rotation_sigma) || bad(scale_sigma)) {
    throw Error(ErrorCode::kInvalidConfig, "noise model has non-finite entries");
  }
  if (rotation_sigma < 0.0 || scale_sigma < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "noise sigmas must be non-negative");
  }
  const double tol = 1e-12 * std::max(1.0, std::max(cov_ee, cov_nn));
  if (cov_ee < 0.0 || cov_nn < 0.0 || cov_ee * cov_nn - cov_en * cov_en < -tol * tol) {
    throw Error(ErrorCode::kInvalidConfig, "translation covariance is not positive semidefinite");
  }
}

namespace {

geo::LocalPoint map_vertex(geo::LocalPoint v, geo::LocalPoint c, double cos_t, double sin_t,
                           double s, geo::LocalPoint t) {
  const geo::LocalPoint d = v - c;
  return geo::LocalPoint{s * (cos_t * d.east - sin_t * d.north),
                         s * (sin_t * d.east + cos_t * d.north)} +
         c + t;
}

}  // namespace

geo::Feature sample_feature(const geo::Feature& f, const AffineNoiseModel& model,
                            mc::NormalStream& stream) {
  const double z_rot = stream.next();
  const double z_scale = stream.next();
  const double z_e = stream.next();
  const double z_n = stream.next();
  if (model.is_zero()) return f;

  // Cholesky factor of the translation covariance (PSD, so clamp round-off).
  const double l11 = std::sqrt(std::max(0.0, model.cov_ee));
  const double l21 = l11 > 0.0 ? model.cov_en / l11 : 0.0;
  const double l22 = std::sqrt(std::max(0.0, model.cov_nn - l21 * l21));
  const geo::LocalPoint t{l11 * z_e, l21 * z_e + l22 * z_n};

  if (model.rotation_sigma == 0.0 && model.scale_sigma == 0.0) return geo::translate(f, t);

  const double theta = model.rotation_sigma * z_rot;
  const double s = 1.0 + model.scale_sigma * z_scale;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const geo::LocalPoint c = geo::vertex_centroid(f.geometry);

  geo::Feature out = f;
  std::visit(
      [&](auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, geo::PointGeometry>) {
          g.position = map_vertex(g.position, c, cos_t, sin_t, s, t);
        } else if constexpr (std::is_same_v<G, geo::Polyline>) {
          for (auto& v : g.vertices) v = map_vertex(v, c, cos_t, sin_t, s, t);
        } else {
          for (auto& v : g.ring) v = map_vertex(v, c, cos_t, sin_t, s, t);
        }
      },
      out.geometry);
  return out;
}

const ClassRasters& RelationField::of(std::string_view c) const {
  const auto it = rasters.find(std::string(c));
  if (it == rasters.end()) {
    throw Error(ErrorCode::kUnknownClass, "class '" + std::string(c) + "' is not in the field");
  }
  return it->second;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string noise_digest(const RelationRequest& request) {
  Digest d;
  for (const auto& c : request.classes) {
    d.field(c);
    const auto n = request.noise.find(c);
    const AffineNoiseModel m = n == request.noise.end() ? AffineNoiseModel{} : n->second;
    for (double v : {m.cov_ee, m.cov_en, m.cov_nn, m.rotation_sigma, m.scale_sigma}) {
      d.field(shortest(v));
    }
    const auto b = request.buffer_widths.find(c);
    d.field(shortest(b == request.buffer_widths.end() ? 0.0 : b->second));
  }
  return d.hex();
}

// One perturbed instance of a class feature: the geometry used for
// distances and, when it has an area, the ring used for `over`.
struct Sampled {
  geo::Feature shape;
  std::vector<geo::LocalPoint> area;
};

struct ClassSamples {
  std::size_t feature_count = 0;
  std::vector<Sampled> items;  // sample-major: items[n * feature_count + k]
};

void run_chunks(std::size_t total, unsigned threads,
                const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads == 0 ? 1 : threads, total));
  if (workers == 1) {
    body(0, total);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(total, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(body, begin, end);
  }
  for (auto& t : pool) t.join();
}

}  // namespace

RelationField estimate_relations(const geo::MapLayer& layer, const Grid& grid,
                                 const RelationRequest& request) {
  grid.check();
  const std::size_t n_samples = request.sampling.sample_count;
  if (n_samples < 2) {
    throw Error(ErrorCode::kInvalidConfig, "sample count must be at least 2");
  }
  for (const auto& [c, m] : request.noise) m.check();
  for (const auto& [c, w] : request.buffer_widths) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidConfig, "buffer width for '" + c + "' is invalid");
    }
  }

  RelationField field;
  field.grid = grid;
  field.classes = request.classes;
  field.seed = request.sampling.seed;
  field.sample_count = n_samples;
  field.noise_digest = noise_digest(request);

  // Draw every feature once per sample up front; the per-cell pass only reads.
  std::map<std::string, ClassSamples> samples;
  for (const auto& c : request.classes) {
    if (samples.contains(c)) continue;
    const auto noise_it = request.noise.find(c);
    const AffineNoiseModel model =
        noise_it == request.noise.end() ? AffineNoiseModel{} : noise_it->second;
    const auto width_it = request.buffer_widths.find(c);
    const double width = width_it == request.buffer_widths.end() ? 0.0 : width_it->second;

    ClassSamples& cs = samples[c];
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < layer.features.size(); ++i) {
      if (layer.features[i].feature_class == c) indices.push_back(i);
    }
    cs.feature_count = indices.size();
    cs.items.reserve(indices.size() * n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
      for (std::size_t i : indices) {
        mc::NormalStream stream(request.sampling.seed, static_cast<std::uint32_t>(i),
                                static_cast<std::uint32_t>(n));
        Sampled s{sample_feature(layer.features[i], model, stream), {}};
        if (const auto* poly = std::get_if<geo::Polygon>(&s.shape.geometry)) {
          s.area = poly->ring;
        } else if (std::holds_alternative<geo::Polyline>(s.shape.geometry) && width > 0.0) {
          s.area = std::get<geo::Polygon>(geo::buffer_polyline(s.shape, width).geometry).ring;
        }
        cs.items.push_back(std::move(s));
      }
    }
  }

  const std::size_t cells = grid.size();
  for (const auto& c : request.classes) {
    ClassRasters r;
    r.distance_mean.assign(cells, std::numeric_limits<double>::infinity());
    r.distance_var.assign(cells, kVarianceFloor);
    r.over_prob.assign(cells, 0.0);
    field.rasters[c] = std::move(r);
  }

  for (const auto& c : request.classes) {
    const ClassSamples& cs = samples.at(c);
    if (cs.feature_count == 0) continue;
    ClassRasters& r = field.rasters.at(c);
    run_chunks(cells, request.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> d(n_samples);
      for (std::size_t idx = begin; idx < end; ++idx) {
        const geo::LocalPoint p = grid.center(grid.cell(idx));
        std::size_t over = 0;
        for (std::size_t n = 0; n < n_samples; ++n) {
          double best = std::numeric_limits<double>::infinity();
          bool inside = false;
          for (std::size_t k = 0; k < cs.feature_count; ++k) {
            const Sampled& s = cs.items[n * cs.feature_count + k];
            best = std::min(best, geo::distance_to_feature(p, s.shape));
            if (!inside && !s.area.empty()) inside = geo::point_in_polygon(p, s.area);
          }
          d[n] = best;
          over += inside ? 1 : 0;
        }
        double mean = 0.0;
        for (double v : d) mean += v;
        mean /= static_cast<double>(n_samples);
        double ss = 0.0;
        for (double v : d) ss += (v - mean) * (v - mean);
        r.distance_mean[idx] = mean;
        r.distance_var[idx] = std::max(kVarianceFloor, ss / static_cast<double>(n_samples - 1));
        r.over_prob[idx] = static_cast<double>(over) / static_cast<double>(n_samples);
      }
    });
  }
  return field;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json raster_json(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) {
    if (std::isfinite(v)) {
      out.push_back(v);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "relation field: " + what);
}

std::vector<double> raster_from(const json& j, std::size_t expected, bool allow_null,
                                const std::string& name) {
  if (!j.is_array()) malformed(name + " must be an array");
  if (j.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                name + " has " + std::to_string(j.size()) + " values, grid has " +
                    std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (v.is_null() && allow_null) {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      malformed(name + " contains a non-number");
    }
  }
  return out;
}

}  // namespace

std::string RelationField::to_json() const {
  json j;
  j["grid"] = json_io::grid_to_json(grid);
  j["classes"] = classes;
  j["provenance"] = {{"seed", seed}, {"sample_count", sample_count}, {"noise_digest", noise_digest}};
  json rs = json::object();
  for (const auto& [name, r] : rasters) {
    rs[name] = {{"distance_mean", raster_json(r.distance_mean)},
                {"distance_var", raster_json(r.distance_var)},
                {"over_prob", raster_json(r.over_prob)}};
  }
  j["rasters"] = std::move(rs);
  return j.dump();
}

RelationField RelationField::from_json(std::string_view text) {
  const json j = json_io::parse(text, "relation field");
  if (!j.is_object() || !j.contains("grid")) malformed("missing grid");
  RelationField f;
  f.grid = json_io::grid_from_json(j.at("grid"));
  try {
    f.classes = j.at("classes").get<std::vector<std::string>>();
    const json& p = j.at("provenance");
    f.seed = p.at("seed").get<std::uint64_t>();
    f.sample_count = p.at("sample_count").get<std::size_t>();
    f.noise_digest = p.at("noise_digest").get<std::string>();
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  f.grid.check();
  const json* rs = j.contains("rasters") ? &j.at("rasters") : nullptr;
  if (rs == nullptr || !rs->is_object()) malformed("missing rasters");
  for (const auto& c : f.classes) {
    if (!rs->contains(c)) malformed("missing rasters for class '" + c + "'");
  }
  for (const auto& [name, r] : rs->items()) {
    if (!r.is_object() || !r.contains("distance_mean") || !r.contains("distance_var") ||
        !r.contains("over_prob")) {
      malformed("incomplete rasters for class '" + name + "'");
    }
    ClassRasters cr;
    cr.distance_mean = raster_from(r.at("distance_mean"), f.grid.size(), true, name + ".distance_mean");
    cr.distance_var = raster_from(r.at("distance_var"), f.grid.size(), false, name + ".distance_var");
    cr.over_prob = raster_from(r.at("over_prob"), f.grid.size(), false, name + ".over_prob");
    for (double v : cr.distance_var) {
      if (v < 0.0) malformed(name + ".distance_var is negative");
    }
    for (double v : cr.over_prob) {
      if (v < 0.0 || v > 1.0) malformed(name + ".over_prob is outside [0, 1]");
    }
    f.rasters.emplace(name, std::move(cr));
  }
  return f;
}

std::string RelationField::digest() const { return digest_of(to_json()); }

}  // namespace pmd
