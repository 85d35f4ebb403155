#include "nashsplit/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace nashsplit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

const json& require_field(const json& j, const char* field,
                          const std::string& origin, const std::string& where) {
  auto it = j.find(field);
  if (it == j.end()) fail(origin, where + ": missing field \"" + field + "\"");
  return *it;
}

double number_or_inf(const json& j, const std::string& origin,
                     const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(origin, where + ": expected a number or \"inf\"/\"-inf\"");
}

std::vector<double> parse_vector(const json& j, const std::string& origin,
                                 const std::string& where,
                                 bool allow_inf = false) {
  if (!j.is_array()) fail(origin, where + ": expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (allow_inf) {
      v.push_back(number_or_inf(j[i], origin, at));
    } else {
      if (!j[i].is_number()) fail(origin, at + ": expected a number");
      v.push_back(j[i].get<double>());
    }
  }
  return v;
}

LinearMap parse_matrix(const json& j, const std::string& origin,
                       const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(origin, where + ": expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string at = where + " row " + std::to_string(r);
    rows.push_back(parse_vector(j[r], origin, at));
    if (r == 0) {
      cols = rows[0].size();
      if (cols == 0) fail(origin, at + ": empty row");
    } else if (rows[r].size() != cols) {
      throw DimensionError(origin + ": " + where + " row " + std::to_string(r) +
                           " has length " + std::to_string(rows[r].size()) +
                           ", expected " + std::to_string(cols));
    }
  }
  return LinearMap(rows);
}

ProxFunction parse_prox(const json& j, const std::string& origin,
                        const std::string& where);

ProxFunction parse_prox_with_layout(const json& j, SpaceLayout layout,
                                    const std::string& origin,
                                    const std::string& where) {
  const std::string type =
      require_field(j, "type", origin, where).get<std::string>();
  if (type == "zero") return ProxFunction::zero(std::move(layout));
  if (type == "box")
    return ProxFunction::box(
        std::move(layout),
        parse_vector(require_field(j, "lo", origin, where), origin, where + ".lo", true),
        parse_vector(require_field(j, "hi", origin, where), origin, where + ".hi", true));
  if (type == "ball")
    return ProxFunction::ball(
        std::move(layout),
        parse_vector(require_field(j, "center", origin, where), origin,
                     where + ".center"),
        require_field(j, "radius", origin, where).get<double>());
  if (type == "halfspace")
    return ProxFunction::halfspace(
        std::move(layout),
        parse_vector(require_field(j, "normal", origin, where), origin,
                     where + ".normal"),
        require_field(j, "offset", origin, where).get<double>());
  if (type == "affine")
    return ProxFunction::affine(
        std::move(layout),
        parse_vector(require_field(j, "normal", origin, where), origin,
                     where + ".normal"),
        require_field(j, "offset", origin, where).get<double>());
  if (type == "simplex") return ProxFunction::simplex(std::move(layout));
  if (type == "canonical_simplex")
    return ProxFunction::canonical_simplex(std::move(layout));
  if (type == "separable_sum" || type == "product_set") {
    const json& parts_j = require_field(j, "parts", origin, where);
    if (!parts_j.is_array() || parts_j.empty())
      fail(origin, where + ".parts: expected a non-empty array");
    std::vector<ProxFunction> parts;
    std::vector<int> dims;
    for (std::size_t i = 0; i < parts_j.size(); ++i) {
      parts.push_back(parse_prox(parts_j[i], origin,
                                 where + ".parts[" + std::to_string(i) + "]"));
      dims.push_back(parts.back().layout().total_dim());
    }
    SpaceLayout composite(dims);
    return type == "separable_sum"
               ? ProxFunction::separable_sum(std::move(composite), std::move(parts))
               : ProxFunction::product_set(std::move(composite), std::move(parts));
  }
  fail(origin, where + ": unknown prox type \"" + type + "\"");
}

// Parses a descriptor whose dimension is self-described (vector payloads or an
// explicit "dim" for zero/simplex kinds).
ProxFunction parse_prox(const json& j, const std::string& origin,
                        const std::string& where) {
  const std::string type =
      require_field(j, "type", origin, where).get<std::string>();
  int dim = 0;
  if (type == "zero" || type == "simplex" || type == "canonical_simplex") {
    dim = require_field(j, "dim", origin, where).get<int>();
    if (dim < 1) fail(origin, where + ".dim: must be >= 1");
  } else if (type == "box") {
    dim = static_cast<int>(require_field(j, "lo", origin, where).size());
  } else if (type == "ball") {
    dim = static_cast<int>(require_field(j, "center", origin, where).size());
  } else if (type == "halfspace" || type == "affine") {
    dim = static_cast<int>(require_field(j, "normal", origin, where).size());
  } else if (type == "separable_sum" || type == "product_set") {
    return parse_prox_with_layout(j, SpaceLayout::single(1), origin, where);
    // layout argument unused for composite kinds; parts define it
  } else {
    fail(origin, where + ": unknown prox type \"" + type + "\"");
  }
  return parse_prox_with_layout(j, SpaceLayout::single(dim), origin, where);
}

// Re-interpret a parsed descriptor over a multi-block layout (the flat
// dimension must agree).
ProxFunction reshape_prox(const ProxFunction& f, const SpaceLayout& layout,
                          const std::string& origin, const std::string& where) {
  if (f.layout().total_dim() != layout.total_dim())
    throw DimensionError(origin + ": " + where + " covers " +
                         std::to_string(f.layout().total_dim()) +
                         " dims, problem expects " +
                         std::to_string(layout.total_dim()));
  if (f.layout() == layout) return f;
  switch (f.kind()) {
    case ProxFunction::Kind::Zero:
      return ProxFunction::zero(layout);
    case ProxFunction::Kind::Box:
      return ProxFunction::box(layout, f.lo(), f.hi());
    case ProxFunction::Kind::Ball:
      return ProxFunction::ball(layout, f.center(), f.radius());
    case ProxFunction::Kind::Halfspace:
      return ProxFunction::halfspace(layout, f.normal(), f.offset());
    case ProxFunction::Kind::Affine:
      return ProxFunction::affine(layout, f.normal(), f.offset());
    case ProxFunction::Kind::Simplex:
      return ProxFunction::simplex(layout);
    case ProxFunction::Kind::CanonicalSimplex:
      return ProxFunction::canonical_simplex(layout);
    case ProxFunction::Kind::SeparableSum:
      return ProxFunction::separable_sum(layout, f.parts());
    case ProxFunction::Kind::ProductSet:
      return ProxFunction::product_set(layout, f.parts());
  }
  fail(origin, where + ": unknown prox kind");
}

std::vector<int> parse_dims(const json& j, const std::string& origin) {
  const json& dims_j = require_field(j, "dims", origin, "problem");
  if (!dims_j.is_array() || dims_j.empty())
    fail(origin, "problem.dims: expected a non-empty array of integers");
  std::vector<int> dims;
  for (std::size_t i = 0; i < dims_j.size(); ++i) {
    if (!dims_j[i].is_number_integer())
      fail(origin, "problem.dims[" + std::to_string(i) + "]: expected an integer");
    dims.push_back(dims_j[i].get<int>());
  }
  return dims;
}

json prox_to_json(const ProxFunction& f);

json vector_to_json(const std::vector<double>& v, bool allow_inf = false) {
  json arr = json::array();
  for (double x : v) {
    if (allow_inf && std::isinf(x))
      arr.push_back(x > 0 ? "inf" : "-inf");
    else
      arr.push_back(x);
  }
  return arr;
}

json matrix_to_json(const LinearMap& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json prox_to_json(const ProxFunction& f) {
  json j;
  switch (f.kind()) {
    case ProxFunction::Kind::Zero:
      j["type"] = "zero";
      j["dim"] = f.layout().total_dim();
      return j;
    case ProxFunction::Kind::Box:
      j["type"] = "box";
      j["lo"] = vector_to_json(f.lo(), true);
      j["hi"] = vector_to_json(f.hi(), true);
      return j;
    case ProxFunction::Kind::Ball:
      j["type"] = "ball";
      j["center"] = vector_to_json(f.center());
      j["radius"] = f.radius();
      return j;
    case ProxFunction::Kind::Halfspace:
      j["type"] = "halfspace";
      j["normal"] = vector_to_json(f.normal());
      j["offset"] = f.offset();
      return j;
    case ProxFunction::Kind::Affine:
      j["type"] = "affine";
      j["normal"] = vector_to_json(f.normal());
      j["offset"] = f.offset();
      return j;
    case ProxFunction::Kind::Simplex:
      j["type"] = "simplex";
      j["dim"] = f.layout().total_dim();
      return j;
    case ProxFunction::Kind::CanonicalSimplex:
      j["type"] = "canonical_simplex";
      j["dim"] = f.layout().total_dim();
      return j;
    case ProxFunction::Kind::SeparableSum:
    case ProxFunction::Kind::ProductSet: {
      j["type"] = f.kind() == ProxFunction::Kind::SeparableSum ? "separable_sum"
                                                               : "product_set";
      json parts = json::array();
      for (const auto& p : f.parts()) parts.push_back(prox_to_json(p));
      j["parts"] = std::move(parts);
      return j;
    }
  }
  return j;
}

}  // namespace

ProblemSpec parse_problem(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Recover the line number from the byte offset for a usable message.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
  if (!j.is_object()) fail(origin, "problem: expected a JSON object");
  std::string kind;
  try {
    kind = require_field(j, "kind", origin, "problem").get<std::string>();
    if (kind == "zero_sum") {
      return build_zero_sum(
          parse_matrix(require_field(j, "matrix", origin, "problem"), origin,
                       "problem.matrix"));
    }
    if (kind == "saddle") {
      LinearMap q1 = parse_matrix(require_field(j, "q1", origin, "problem"),
                                  origin, "problem.q1");
      LinearMap m = parse_matrix(require_field(j, "m", origin, "problem"),
                                 origin, "problem.m");
      LinearMap q2 = parse_matrix(require_field(j, "q2", origin, "problem"),
                                  origin, "problem.q2");
      SpaceLayout layout({q1.rows(), q2.rows()});
      ProxFunction f =
          reshape_prox(parse_prox(require_field(j, "f", origin, "problem"),
                                  origin, "problem.f"),
                       layout, origin, "problem.f");
      return build_saddle(q1, m, q2, std::move(f));
    }
    if (kind == "gne" || kind == "custom_linear") {
      SpaceLayout layout(parse_dims(j, origin));
      LinearMap a = parse_matrix(require_field(j, "matrix", origin, "problem"),
                                 origin, "problem.matrix");
      std::vector<double> offset;
      if (j.contains("offset"))
        offset = parse_vector(j["offset"], origin, "problem.offset");
      const char* f_field = kind == "gne" ? "constraint" : "f";
      ProxFunction f =
          reshape_prox(parse_prox(require_field(j, f_field, origin, "problem"),
                                  origin, std::string("problem.") + f_field),
                       layout, origin, std::string("problem.") + f_field);
      if (kind == "gne")
        return build_gne_linear(layout, std::move(f), std::move(a),
                                std::move(offset));
      const bool coco = j.value("cocoercive", false);
      return build_custom_linear(layout, std::move(f), std::move(a),
                                 std::move(offset), coco);
    }
    if (kind == "cyclic_prox" || kind == "cyclic_projection") {
      const char* field = kind == "cyclic_prox" ? "parts" : "sets";
      const json& parts_j = require_field(j, field, origin, "problem");
      if (!parts_j.is_array() || parts_j.size() < 2)
        fail(origin, std::string("problem.") + field +
                         ": expected an array of at least two descriptors");
      std::vector<ProxFunction> parts;
      for (std::size_t i = 0; i < parts_j.size(); ++i)
        parts.push_back(parse_prox(parts_j[i], origin,
                                   std::string("problem.") + field + "[" +
                                       std::to_string(i) + "]"));
      return kind == "cyclic_prox" ? build_cyclic_prox(std::move(parts))
                                   : build_cyclic_projection(std::move(parts));
    }
  } catch (const json::exception& e) {
    fail(origin, std::string("schema violation: ") + e.what());
  }
  fail(origin, "problem.kind: unknown kind \"" + kind + "\"");
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

std::string problem_to_json(const ProblemSpec& spec) {
  json j;
  switch (spec.kind) {
    case ProblemKind::ZeroSumGame:
      j["kind"] = "zero_sum";
      j["matrix"] = matrix_to_json(*spec.zero_sum_matrix);
      break;
    case ProblemKind::SaddleProblem:
      j["kind"] = "saddle";
      j["q1"] = matrix_to_json(*spec.saddle_q1);
      j["m"] = matrix_to_json(*spec.saddle_m);
      j["q2"] = matrix_to_json(*spec.saddle_q2);
      j["f"] = prox_to_json(spec.f);
      break;
    case ProblemKind::Gne:
      j["kind"] = "gne";
      j["dims"] = spec.layout.dims();
      j["matrix"] = matrix_to_json(*spec.gradient_matrix);
      if (spec.gradient_offset) j["offset"] = vector_to_json(*spec.gradient_offset);
      j["constraint"] = prox_to_json(spec.f);
      break;
    case ProblemKind::Custom:
      if (!spec.gradient_matrix)
        throw ValidationError(
            "problem_to_json: custom problems without a gradient matrix have "
            "no file representation");
      j["kind"] = "custom_linear";
      j["dims"] = spec.layout.dims();
      j["matrix"] = matrix_to_json(*spec.gradient_matrix);
      if (spec.gradient_offset) j["offset"] = vector_to_json(*spec.gradient_offset);
      j["f"] = prox_to_json(spec.f);
      j["cocoercive"] = spec.b.cocoercive();
      break;
    case ProblemKind::CyclicProx: {
      j["kind"] = "cyclic_prox";
      json parts = json::array();
      for (const auto& p : spec.f.parts()) parts.push_back(prox_to_json(p));
      j["parts"] = std::move(parts);
      break;
    }
    case ProblemKind::CyclicProjection: {
      j["kind"] = "cyclic_projection";
      json sets = json::array();
      for (const auto& p : spec.f.parts()) sets.push_back(prox_to_json(p));
      j["sets"] = std::move(sets);
      break;
    }
  }
  return j.dump(2);
}

void write_problem(const ProblemSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << problem_to_json(spec) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace nashsplit
