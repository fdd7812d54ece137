#include "pmd/landscape/pml.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <thread>

#include <json.hpp>

#include "pmd/digest.hpp"
#include "pmd/dsl/parser.hpp"
#include "pmd/error.hpp"
#include "pmd/json_io.hpp"

namespace pmd {

using nlohmann::json;

dsl::Atom default_query() {
  return {"landscape", {dsl::Variable{"X"}, dsl::Variable{"Y"}}};
}

std::string program_digest(const dsl::Program& program) {
  Digest d;
  d.field(dsl::pretty_print(program));
  for (const auto& [k, v] : program.parameter_labels) d.field(k).field(v);
  return d.hex();
}

namespace {

struct CellFailure {
  std::size_t index;
  ErrorCode code;
  std::string message;
};

}  // namespace

Pml compute_pml(const dsl::Program& program, const RelationField& field,
                const dsl::Assignment& assignment, const dsl::Atom& query,
                const ComputeOptions& options) {
  field.grid.check();
  const dsl::Program effective = dsl::reassign(program, assignment);

  Pml pml;
  pml.grid = field.grid;
  pml.query = query;
  pml.assignment = dsl::identify_parameters(effective).current();
  pml.program_digest = program_digest(effective);
  pml.field_digest = field.digest();
  pml.seed = field.seed;

  const std::size_t cells = field.grid.size();
  pml.values.assign(cells, 0.0);
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, cells);
  std::vector<std::optional<CellFailure>> failures(workers);

  auto work = [&](std::size_t w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const auto gp = inference::ground(effective, field.grid.cell(i), field, query);
        pml.values[i] = inference::query_probability(gp, options.world_limit);
      } catch (const Error& e) {
        failures[w] = CellFailure{i, e.code(), e.what()};
        return;
      }
    }
  };
  const std::size_t chunk = (cells + workers - 1) / workers;
  if (workers == 1) {
    work(0, 0, cells);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(cells, begin + chunk);
      if (begin < end) pool.emplace_back(work, w, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  // Chunks are ordered, so the first recorded failure has the lowest cell.
  for (const auto& f : failures) {
    if (f) {
      throw Error(f->code, "cell " + to_string(field.grid.cell(f->index)) + ": " + f->message);
    }
  }
  return pml;
}

// ---------------------------------------------------------------------------
// Documents

namespace {

constexpr const char* kFormat = "pmd-pml";
constexpr int kVersion = 1;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "pml: " + what);
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string Pml::to_json() const {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["grid"] = json_io::grid_to_json(grid);
  j["query"] = dsl::to_string(query);
  j["assignment"] = assignment;
  j["provenance"] = {
      {"program_digest", program_digest}, {"field_digest", field_digest}, {"seed", seed}};
  j["values"] = values;
  return j.dump();
}

Pml Pml::from_json(std::string_view text) {
  const json j = json_io::parse(text, "pml");
  if (!j.is_object()) malformed("document is not an object");
  if (j.value("format", std::string()) != kFormat) malformed("not a pml document");
  if (!j.contains("version") || j.at("version") != kVersion) malformed("unsupported version");
  if (!j.contains("grid")) malformed("missing grid");
  Pml p;
  p.grid = json_io::grid_from_json(j.at("grid"));
  p.grid.check();
  try {
    p.query = dsl::parse_atom(j.at("query").get<std::string>());
    p.assignment = j.at("assignment").get<dsl::Assignment>();
    const json& prov = j.at("provenance");
    p.program_digest = prov.at("program_digest").get<std::string>();
    p.field_digest = prov.at("field_digest").get<std::string>();
    p.seed = prov.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    malformed(e.what());
  } catch (const dsl::SyntaxError& e) {
    malformed(std::string("query: ") + e.what());
  }
  const json& values = j.contains("values") ? j.at("values") : json();
  if (!values.is_array()) malformed("values must be an array");
  if (values.size() != p.grid.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pml has " + std::to_string(values.size()) + " values, grid has " +
                    std::to_string(p.grid.size()));
  }
  p.values.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) malformed("values must be numbers");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) malformed("value " + shortest(x) + " is outside [0, 1]");
    p.values.push_back(x);
  }
  return p;
}

std::string Pml::to_csv() const {
  std::string out;
  for (std::size_t r = 0; r < grid.height_cells; ++r) {
    for (std::size_t c = 0; c < grid.width_cells; ++c) {
      if (c) out += ',';
      out += shortest(values[grid.index({r, c})]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache

std::shared_ptr<const Pml> PmlCache::get(const dsl::Program& program, const RelationField& field,
                                         const dsl::Assignment& assignment,
                                         const dsl::Atom& query) {
  const auto effective =
      dsl::identify_parameters(dsl::reassign(program, assignment)).current();
  const std::string key = program_digest(program) + "|" + field.digest() + "|" +
                          dsl::to_string(effective) + "|" + dsl::to_string(query);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto pml = std::make_shared<const Pml>(compute_pml(program, field, assignment, query, options_));
  std::lock_guard lock(mutex_);
  ++misses_;
  entries_[key] = pml;  // identical inputs give identical values
  return pml;
}

std::size_t PmlCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t PmlCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t PmlCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

}  // namespace pmd
