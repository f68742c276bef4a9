#include "scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ddfem/error.hpp"
#include "ddfem/expression.hpp"
#include "ddfem/geometry/json.hpp"

namespace ddfem::cli {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParse, "scene: " + where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) parse_error(where, "expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) parse_error(where, "expected a string");
  return j.get<std::string>();
}

// Numbers are accepted where expressions are expected.
std::string expression(const json& j, const std::string& where) {
  std::string src;
  if (j.is_number()) {
    std::ostringstream out;
    out.precision(17);
    out << j.get<double>();
    src = out.str();
  } else {
    src = string(j, where);
  }
  try {
    Expression::parse(src);
  } catch (const Error& e) {
    parse_error(where, e.what());
  }
  return src;
}

Point point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) parse_error(where, "expected [x, y]");
  return make_point({number(j[0], where + "[0]"), number(j[1], where + "[1]")});
}

std::array<int, 2> resolution(const json& j, const std::string& where) {
  std::array<int, 2> out{};
  if (j.is_number_integer()) {
    out = {j.get<int>(), j.get<int>()};
  } else if (j.is_array() && j.size() == 2) {
    out = {integer(j[0], where + "[0]"), integer(j[1], where + "[1]")};
  } else {
    parse_error(where, "expected an integer or [nx, ny]");
  }
  if (out[0] < 2 || out[1] < 2) parse_error(where, "at least 2 cells per axis");
  return out;
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) {
      std::string list;
      for (auto k : known) list += (list.empty() ? "" : ", ") + std::string(k);
      parse_error(where, "unknown key '" + key + "' (known: " + list + ")");
    }
  }
}

BoundarySpec boundary_entry(const json& j, const std::string& where) {
  if (!j.is_object()) parse_error(where, "expected an object");
  reject_unknown(j, where, {"segment", "type", "value", "where"});
  BoundarySpec b;
  if (!j.contains("segment")) parse_error(where, "missing 'segment'");
  if (!j.contains("type")) parse_error(where, "missing 'type'");
  b.segment = string(j["segment"], where + ".segment");
  b.type = string(j["type"], where + ".type");
  if (b.type != "dirichlet" && b.type != "flux_c" && b.type != "flux_v" && b.type != "flux_pair") {
    parse_error(where + ".type", "'" + b.type + "' is not dirichlet, flux_c, flux_v or flux_pair");
  }
  const json value = j.value("value", json(0));
  if (b.type == "flux_pair") {
    if (value.is_object()) {
      reject_unknown(value, where + ".value", {"convective", "viscous"});
      b.value = expression(value.value("convective", json(0)), where + ".value.convective");
      b.viscous = expression(value.value("viscous", json(0)), where + ".value.viscous");
    } else if (value.is_array() && value.size() == 2) {
      b.value = expression(value[0], where + ".value[0]");
      b.viscous = expression(value[1], where + ".value[1]");
    } else {
      b.value = expression(value, where + ".value");
      b.viscous = b.value;
      if (b.value != "0") {
        parse_error(where + ".value", "flux_pair needs {\"convective\": .., \"viscous\": ..}");
      }
    }
  } else {
    b.value = expression(value, where + ".value");
  }
  if (j.contains("where")) {
    if (b.segment != "mesh") parse_error(where + ".where", "only mesh entries take a selector");
    b.where = expression(j["where"], where + ".where");
  }
  return b;
}

Expression::Env env_of(double t, const Point& x, const State* U = nullptr, const Flux* DU = nullptr,
                       const Point* n = nullptr) {
  Expression::Env env;
  env.t = t;
  env.x = &x;
  env.U = U;
  env.DU = DU;
  env.n = n;
  return env;
}

boundary::BoundaryCondition condition_of(const BoundarySpec& b, int m) {
  if (b.type == "dirichlet") {
    const Expression g = Expression::parse(b.value);
    return boundary::DirichletValue{
        [g, m](double t, const Point& x) { return g.evaluate_state(env_of(t, x), m); }};
  }
  const auto convective = [m](const Expression& g) {
    return boundary::FluxC{[g, m](double t, const Point& x, const State& U, const Point& n) {
      return g.evaluate_state(env_of(t, x, &U, nullptr, &n), m);
    }};
  };
  const auto viscous = [m](const Expression& g) {
    return boundary::FluxV{
        [g, m](double t, const Point& x, const State& U, const Flux& DU, const Point& n) {
          return g.evaluate_state(env_of(t, x, &U, &DU, &n), m);
        }};
  };
  if (b.type == "flux_c") return convective(Expression::parse(b.value));
  if (b.type == "flux_v") return viscous(Expression::parse(b.value));
  return boundary::FluxPair{convective(Expression::parse(b.value)),
                            viscous(Expression::parse(b.viscous))};
}

}  // namespace

Scene parse_scene(const json& j, std::filesystem::path path) {
  if (!j.is_object()) parse_error("root", "expected an object");
  reject_unknown(j, "root",
                 {"geometry", "epsilon", "box", "resolution", "h", "filter", "problem", "boundary",
                  "transformer", "out_factor_i", "out_factor_e", "penalty_exponent", "solver",
                  "exact", "convergence", "render", "output", "description"});
  Scene s;
  s.raw = j;
  s.path = std::move(path);
  if (!j.contains("geometry")) parse_error("root", "missing 'geometry'");
  s.geometry = j["geometry"];
  try {
    geometry::sdf_from_json(s.geometry);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("scene: geometry: ") + e.what());
  }
  if (j.contains("epsilon")) {
    s.epsilon = number(j["epsilon"], "epsilon");
    if (!(*s.epsilon > 0.0)) parse_error("epsilon", "must be positive");
  }
  if (!j.contains("box")) parse_error("root", "missing 'box'");
  {
    const json& box = j["box"];
    if (!box.is_object()) parse_error("box", "expected {\"lower\": [..], \"upper\": [..]}");
    reject_unknown(box, "box", {"lower", "upper"});
    if (!box.contains("lower") || !box.contains("upper")) parse_error("box", "needs lower and upper");
    s.lower = point(box["lower"], "box.lower");
    s.upper = point(box["upper"], "box.upper");
    if (!(s.lower[0] < s.upper[0] && s.lower[1] < s.upper[1])) parse_error("box", "lower must be below upper");
  }
  if (j.contains("resolution")) s.resolution = resolution(j["resolution"], "resolution");
  if (j.contains("h")) {
    s.h = number(j["h"], "h");
    if (!(*s.h > 0.0)) parse_error("h", "must be positive");
  }
  if (j.contains("filter")) {
    const json& f = j["filter"];
    if (f.is_boolean()) {
      s.filter = f.get<bool>();
    } else if (f.is_object()) {
      reject_unknown(f, "filter", {"threshold"});
      s.filter = true;
      if (f.contains("threshold")) s.filter_threshold = number(f["threshold"], "filter.threshold");
    } else {
      parse_error("filter", "expected true, false or {\"threshold\": r}");
    }
  }
  if (j.contains("problem")) {
    const json& p = j["problem"];
    if (p.is_string()) {
      s.problem = p.get<std::string>();
    } else if (p.is_object()) {
      reject_unknown(p, "problem", {"name", "coefficients"});
      if (!p.contains("name")) parse_error("problem", "missing 'name'");
      s.problem = string(p["name"], "problem.name");
      if (p.contains("coefficients")) {
        if (!p["coefficients"].is_object()) parse_error("problem.coefficients", "expected an object");
        for (const auto& [key, value] : p["coefficients"].items()) {
          s.coefficients[key] = expression(value, "problem.coefficients." + key);
        }
      }
    } else {
      parse_error("problem", "expected a name or {\"name\": .., \"coefficients\": {..}}");
    }
  }
  try {
    model::problem_info(s.problem);
  } catch (const Error& e) {
    parse_error("problem", e.what());
  }
  if (j.contains("boundary")) {
    if (!j["boundary"].is_array()) parse_error("boundary", "expected a list");
    for (std::size_t k = 0; k < j["boundary"].size(); ++k) {
      s.boundary.push_back(boundary_entry(j["boundary"][k], "boundary[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("transformer")) s.transformer = string(j["transformer"], "transformer");
  if (j.contains("out_factor_i") && !j["out_factor_i"].is_null()) s.out_factor_i = number(j["out_factor_i"], "out_factor_i");
  if (j.contains("out_factor_e") && !j["out_factor_e"].is_null()) s.out_factor_e = number(j["out_factor_e"], "out_factor_e");
  if (j.contains("penalty_exponent")) s.penalty_exponent = number(j["penalty_exponent"], "penalty_exponent");
  if (j.contains("solver")) {
    const json& v = j["solver"];
    if (!v.is_object()) parse_error("solver", "expected an object");
    reject_unknown(v, "solver", {"mode", "dt", "steps", "initial", "tolerance", "max_iterations"});
    if (v.contains("mode")) s.solver.mode = string(v["mode"], "solver.mode");
    if (s.solver.mode != "stationary" && s.solver.mode != "time") {
      parse_error("solver.mode", "expected 'stationary' or 'time'");
    }
    if (v.contains("dt")) s.solver.dt = number(v["dt"], "solver.dt");
    if (v.contains("steps")) s.solver.steps = integer(v["steps"], "solver.steps");
    if (v.contains("initial")) s.solver.initial = expression(v["initial"], "solver.initial");
    if (v.contains("tolerance")) s.solver.tolerance = number(v["tolerance"], "solver.tolerance");
    if (v.contains("max_iterations")) s.solver.max_iterations = integer(v["max_iterations"], "solver.max_iterations");
    if (!(s.solver.dt > 0.0)) parse_error("solver.dt", "must be positive");
    if (s.solver.steps < 0) parse_error("solver.steps", "must be non-negative");
  }
  if (j.contains("exact")) s.exact = expression(j["exact"], "exact");
  if (j.contains("convergence")) {
    const json& c = j["convergence"];
    if (!c.is_object()) parse_error("convergence", "expected an object");
    reject_unknown(c, "convergence", {"epsilons", "h_factor"});
    if (c.contains("epsilons")) {
      if (!c["epsilons"].is_array()) parse_error("convergence.epsilons", "expected a list");
      for (const auto& e : c["epsilons"]) {
        const double eps = number(e, "convergence.epsilons");
        if (!(eps > 0.0)) parse_error("convergence.epsilons", "must be positive");
        s.convergence_epsilons.push_back(eps);
      }
    }
    if (c.contains("h_factor")) s.h_factor = number(c["h_factor"], "convergence.h_factor");
  }
  if (j.contains("render")) {
    const json& r = j["render"];
    if (!r.is_object()) parse_error("render", "expected an object");
    reject_unknown(r, "render", {"field", "resolution"});
    if (r.contains("field")) s.render_field = string(r["field"], "render.field");
    if (r.contains("resolution")) s.render_resolution = resolution(r["resolution"], "render.resolution");
  }
  if (j.contains("output")) s.output = string(j["output"], "output");
  return s;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read scene file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "scene " + path.string() + ": " + e.what());
  }
  Scene s = parse_scene(j, path);
  s.text = buffer.str();
  return s;
}

geometry::Sdf build_geometry(const Scene& scene, std::optional<double> epsilon) {
  geometry::Sdf root = geometry::sdf_from_json(scene.geometry);
  if (root->dim() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "scene geometry must be two dimensional");
  }
  if (const auto eps = epsilon ? epsilon : scene.epsilon) root->set_epsilon(*eps);
  return root;
}

model::PdeModel build_model(const Scene& scene, int dim) {
  model::PdeModel m = model::make_problem(scene.problem, dim, scene.coefficients);
  for (const auto& b : scene.boundary) {
    auto condition = condition_of(b, m.components);
    if (b.segment == "mesh") {
      boundary::MeshPredicate region = boundary::whole_mesh_boundary();
      if (!b.where.empty()) {
        const Expression sel = Expression::parse(b.where);
        region = [sel](const Point& x) { return sel.evaluate_scalar(env_of(0.0, x)) != 0.0; };
      }
      m.boundary.add(std::move(region), std::move(condition));
    } else {
      m.boundary.add(b.segment, std::move(condition));
    }
  }
  m.out_factor_implicit = scene.out_factor_i;
  m.out_factor_explicit = scene.out_factor_e;
  return m;
}

Grid scene_grid(const Scene& scene, double epsilon, bool use_h_factor) {
  const double lx = scene.upper[0] - scene.lower[0];
  const double ly = scene.upper[1] - scene.lower[1];
  Grid g;
  if (scene.resolution && !use_h_factor) {
    g.nx = (*scene.resolution)[0];
    g.ny = (*scene.resolution)[1];
  } else {
    const double h = (scene.h && !use_h_factor) ? *scene.h : scene.h_factor * epsilon;
    // Guard against ceil(10.000000000000002) = 11 from the division.
    g.nx = std::max(2, static_cast<int>(std::ceil(lx / h - 1e-9)));
    g.ny = std::max(2, static_cast<int>(std::ceil(ly / h - 1e-9)));
  }
  g.h = std::max(lx / g.nx, ly / g.ny);
  return g;
}

void check_resolution(const Grid& grid, double epsilon) {
  if (grid.h > 0.5 * epsilon * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid spacing h = " << grid.h << " exceeds epsilon / 2 = " << 0.5 * epsilon
        << "; refine the grid or pass --allow-coarse";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace ddfem::cli
