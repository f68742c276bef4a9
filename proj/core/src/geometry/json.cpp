#include "ddfem/geometry/json.hpp"

#include <functional>
#include <map>
#include <string>

#include "ddfem/error.hpp"

namespace ddfem::geometry {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParse, "geometry" + path + ": " + what);
}

const json& field(const json& node, const std::string& path, const char* key) {
  if (!node.contains(key)) fail(path, std::string("missing field '") + key + "'");
  return node.at(key);
}

double number(const json& node, const std::string& path, const char* key) {
  const json& v = field(node, path, key);
  if (!v.is_number()) fail(path, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Point point(const json& node, const std::string& path, const char* key) {
  const json& v = field(node, path, key);
  if (!v.is_array() || v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
    fail(path, std::string("field '") + key + "' must be an array of 1 to 3 numbers");
  }
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path, std::string("field '") + key + "' must hold numbers");
    p[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return p;
}

Sdf parse(const json& node, const std::string& path);

std::vector<Sdf> parse_children(const json& node, const std::string& path) {
  std::vector<Sdf> out;
  if (node.contains("child")) {
    out.push_back(parse(node.at("child"), path + ".child"));
    return out;
  }
  const json& children = field(node, path, "children");
  if (!children.is_array()) fail(path, "'children' must be an array");
  for (std::size_t i = 0; i < children.size(); ++i) {
    out.push_back(parse(children[i], path + ".children[" + std::to_string(i) + "]"));
  }
  return out;
}

Sdf single_child(const json& node, const std::string& path) {
  auto children = parse_children(node, path);
  if (children.size() != 1) fail(path, "expected exactly one child");
  return children.front();
}

Sdf fold(const json& node, const std::string& path,
         const std::function<Sdf(Sdf, Sdf)>& combine) {
  auto children = parse_children(node, path);
  if (children.size() < 2) fail(path, "boolean operators need at least two children");
  Sdf acc = children[0];
  for (std::size_t i = 1; i < children.size(); ++i) acc = combine(acc, children[i]);
  return acc;
}

Sdf parse_kind(const json& node, const std::string& path, const std::string& kind) {
  if (kind == "ball") return ball(number(node, path, "radius"), point(node, path, "center"));
  if (kind == "box") return box(point(node, path, "center"), point(node, path, "half_extents"));
  if (kind == "halfplane") {
    return half_plane(point(node, path, "normal"), number(node, path, "offset"));
  }
  if (kind == "union") return fold(node, path, [](Sdf a, Sdf b) { return a | b; });
  if (kind == "intersection") return fold(node, path, [](Sdf a, Sdf b) { return a & b; });
  if (kind == "subtraction") return fold(node, path, [](Sdf a, Sdf b) { return a - b; });
  if (kind == "xor") return fold(node, path, [](Sdf a, Sdf b) { return a ^ b; });
  if (kind == "invert") return -single_child(node, path);
  if (kind == "translate") {
    return translate(single_child(node, path), point(node, path, "offset"));
  }
  if (kind == "rotate") {
    Sdf child = single_child(node, path);
    const double angle = number(node, path, "angle");
    if (node.contains("axis")) {
      return std::make_shared<Rotate>(child, point(node, path, "axis"), angle);
    }
    return rotate(child, angle);
  }
  if (kind == "scale") return scale(single_child(node, path), number(node, path, "factor"));
  if (kind == "round") return round(single_child(node, path), number(node, path, "radius"));
  if (kind == "extrusion") {
    return extrude(single_child(node, path), number(node, path, "height"));
  }
  if (kind == "revolution") {
    const double offset = node.contains("offset") ? number(node, path, "offset") : 0.0;
    return revolve(single_child(node, path), offset);
  }
  fail(path, "unknown kind '" + kind + "'");
}

Sdf parse(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const json& kind = field(node, path, "kind");
  if (!kind.is_string()) fail(path, "'kind' must be a string");
  Sdf sdf;
  try {
    sdf = parse_kind(node, path, kind.get<std::string>());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    fail(path, e.what());
  }
  if (node.contains("name")) {
    if (!node.at("name").is_string()) fail(path, "'name' must be a string");
    sdf->set_name(node.at("name").get<std::string>());
  }
  if (node.contains("epsilon")) {
    try {
      sdf->set_epsilon(number(node, path, "epsilon"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse) throw;
      fail(path, e.what());
    }
  }
  return sdf;
}

}  // namespace

Sdf sdf_from_json(const nlohmann::json& node) {
  Sdf root = parse(node, "");
  check_unique_names(*root);
  return root;
}

}  // namespace ddfem::geometry
