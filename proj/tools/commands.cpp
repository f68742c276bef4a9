#include "commands.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ddfem/boundary/boundary_terms.hpp"
#include "ddfem/error.hpp"
#include "ddfem/expression.hpp"
#include "ddfem/fem/assembly.hpp"
#include "ddfem/fem/io.hpp"
#include "ddfem/fem/mesh.hpp"
#include "ddfem/fem/norms.hpp"
#include "ddfem/model/weak_form.hpp"
#include "ddfem/transform/registry.hpp"

#ifndef DDFEM_VERSION
#define DDFEM_VERSION "unknown"
#endif

namespace ddfem::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double scene_epsilon(const Scene& scene, const geometry::SdfNode& root) {
  if (scene.epsilon) return *scene.epsilon;
  return root.epsilon();
}

State evaluate_at(const Expression& e, double t, const Point& x, int m) {
  Expression::Env env;
  env.t = t;
  env.x = &x;
  return e.evaluate_state(env, m);
}

// Van der Corput radical inverse in base b.
double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

std::vector<Point> halton_points(const Scene& scene, int count) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    const double u = radical_inverse(static_cast<std::uint64_t>(k), 2);
    const double v = radical_inverse(static_cast<std::uint64_t>(k), 3);
    out.push_back(make_point({scene.lower[0] + u * (scene.upper[0] - scene.lower[0]),
                              scene.lower[1] + v * (scene.upper[1] - scene.lower[1])}));
  }
  return out;
}

std::string file_stem(const std::string& field) {
  std::string out = field;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
  }
  return out;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016" PRIx64, value);
  return buffer;
}

// Diffuse segment names referenced by the scene, in order of appearance.
std::vector<std::string> diffuse_segments(const Scene& scene) {
  std::vector<std::string> names;
  for (const auto& b : scene.boundary) {
    if (b.segment == "mesh") continue;
    if (std::find(names.begin(), names.end(), b.segment) == names.end()) names.push_back(b.segment);
  }
  return names;
}

boundary::FluxPresence presence_of(const model::PdeModel& m) {
  return {m.has_convective_flux(), m.has_viscous_flux()};
}

// Boundary terms of the scene; `extra` is added as a homogeneous Dirichlet
// segment when the scene does not mention it, so that its weight can be
// rendered.
std::shared_ptr<const boundary::BoundaryTerms> scene_terms(
    const Scene& scene, std::shared_ptr<const geometry::DomainGeometry> domain,
    const std::string& extra = {}) {
  model::PdeModel m = build_model(scene, 2);
  boundary::BoundaryMap map;
  for (const auto& e : m.boundary.entries()) {
    if (boundary::is_diffuse(e.key)) map.add(e.key, e.condition);
  }
  const auto names = diffuse_segments(scene);
  if (!extra.empty() && std::find(names.begin(), names.end(), extra) == names.end()) {
    const int comps = m.components;
    map.add(extra, boundary::DirichletValue{[comps](double, const Point&) {
              return State::Zero(comps).eval();
            }});
  }
  return std::make_shared<const boundary::BoundaryTerms>(std::move(domain), map, presence_of(m));
}

void announce(std::ostream& out, const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) out << "wrote " << f.string() << "\n";
}

}  // namespace

std::filesystem::path output_directory(const Scene& scene, const CommandOptions& options) {
  return options.out ? *options.out : std::filesystem::path(scene.output);
}

void write_manifest(const std::filesystem::path& dir, const Scene& scene,
                    const CommandOptions& options, const json& extra) {
  json manifest;
  manifest["tool"] = "ddfem";
  manifest["version"] = DDFEM_VERSION;
  manifest["command"] = options.command;
  manifest["scene_path"] = scene.path.string();
  manifest["scene_hash"] = "fnv1a64:" + hex64(fnv1a(scene.text.empty() ? scene.raw.dump() : scene.text));
  json params;
  params["transformer"] = options.transformer.value_or(scene.transformer);
  params["allow_coarse"] = options.allow_coarse;
  params["threads"] = fem::default_thread_count();
  params["output"] = output_directory(scene, options).string();
  if (options.field) params["field"] = *options.field;
  if (!options.epsilons.empty()) params["epsilons"] = options.epsilons;
  if (!extra.is_null()) params["run"] = extra;
  manifest["parameters"] = params;
  manifest["scene"] = scene.raw;
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

RenderResult cmd_render(const Scene& scene, const CommandOptions& options) {
  RenderResult result;
  result.field = options.field.value_or(scene.render_field);
  const geometry::Sdf root = build_geometry(scene);

  const bool needs_epsilon = result.field != "sdf" && result.field != "chi";
  std::optional<double> eps;
  if (needs_epsilon || root->has_epsilon()) eps = scene_epsilon(scene, *root);

  Grid grid;
  if (scene.render_resolution) {
    const auto [nx, ny] = *scene.render_resolution;
    grid = {nx, ny,
            std::max((scene.upper[0] - scene.lower[0]) / nx, (scene.upper[1] - scene.lower[1]) / ny)};
  } else if (scene.resolution || scene.h || eps) {
    grid = scene_grid(scene, eps.value_or(0.0));
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "render needs a resolution, an h or an epsilon in the scene");
  }
  if (eps && !options.allow_coarse) check_resolution(grid, *eps);

  std::shared_ptr<const geometry::DomainGeometry> domain;
  if (eps) domain = std::make_shared<const geometry::DomainGeometry>(root, *eps);

  std::function<double(const Point&)> sample;
  if (result.field == "sdf") {
    sample = [&](const Point& x) { return root->value(x); };
  } else if (result.field == "chi") {
    sample = [&](const Point& x) { return geometry::chi(*root, x); };
  } else if (result.field == "phi") {
    sample = [&](const Point& x) { return domain->phi(x); };
  } else if (result.field == "surface_delta") {
    sample = [&](const Point& x) { return domain->surface_delta(x); };
  } else if (result.field.rfind("weight:", 0) == 0) {
    const std::string name = result.field.substr(7);
    domain->segment(name);  // kNotFound with the known names
    auto terms = scene_terms(scene, domain, name);
    std::size_t index = 0;
    for (std::size_t i = 0; i < terms->segments().size(); ++i) {
      if (terms->segments()[i].label == name) index = i;
    }
    sample = [terms, index](const Point& x) { return terms->normalized_weights(x)[index]; };
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown render field '" + result.field +
                    "'; expected sdf, chi, phi, surface_delta or weight:<segment>");
  }

  result.nx = grid.nx + 1;
  result.ny = grid.ny + 1;
  const double hx = (scene.upper[0] - scene.lower[0]) / grid.nx;
  const double hy = (scene.upper[1] - scene.lower[1]) / grid.ny;
  result.points.reserve(static_cast<std::size_t>(result.nx * result.ny));
  for (int j = 0; j < result.ny; ++j) {
    for (int i = 0; i < result.nx; ++i) {
      const double x = i == grid.nx ? scene.upper[0] : scene.lower[0] + i * hx;
      const double y = j == grid.ny ? scene.upper[1] : scene.lower[1] + j * hy;
      result.points.push_back(make_point({x, y}));
    }
  }
  result.values.resize(result.points.size());
  for (std::size_t k = 0; k < result.points.size(); ++k) result.values[k] = sample(result.points[k]);

  const auto dir = output_directory(scene, options);
  const std::string stem = "render_" + file_stem(result.field);
  fem::write_vtk_structured(dir / (stem + ".vtk"), result.nx, result.ny, result.points,
                            {{file_stem(result.field), result.values, 1}});
  std::vector<std::vector<double>> rows;
  rows.reserve(result.points.size());
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    rows.push_back({result.points[k][0], result.points[k][1], result.values[k]});
  }
  fem::write_csv(dir / (stem + ".csv"), {"x", "y", result.field}, rows);
  result.files = {dir / (stem + ".vtk"), dir / (stem + ".csv")};
  return result;
}

SolveResult solve_scene(const Scene& scene, const CommandOptions& options, double epsilon,
                        const Grid& grid) {
  const auto start = Clock::now();
  SolveResult result;
  result.epsilon = epsilon;
  result.grid = grid;

  const geometry::Sdf root = build_geometry(scene, epsilon);
  auto domain = std::make_shared<const geometry::DomainGeometry>(root, epsilon);
  fem::MeshPtr mesh = fem::build_mesh(scene.lower, scene.upper, grid.nx, grid.ny);
  if (scene.filter) {
    mesh = fem::filter_cells(*mesh, *root, scene.filter_threshold.value_or(10.0 * epsilon));
  }
  result.active_cells = mesh->num_active_cells();

  const model::PdeModel model = build_model(scene, 2);
  const std::string name = options.transformer.value_or(scene.transformer);
  const auto& transformer = transform::transformers().lookup(name);
  transform::TransformOptions topts;
  topts.penalty_exponent = scene.penalty_exponent;
  const transform::TransformedModel transformed = transformer(model, domain, topts);
  const int m = transformed.model.components;

  fem::NewtonOptions nopts;
  nopts.absolute_tolerance = scene.solver.tolerance;
  nopts.max_iterations = scene.solver.max_iterations;

  const Expression initial = Expression::parse(scene.solver.initial);
  fem::DiscreteField U = fem::DiscreteField::interpolate(
      mesh, m, [&](const Point& x) { return evaluate_at(initial, 0.0, x, m); });
  const fem::Assembler assembler(model::model_to_weak_form(transformed.model, 0.0), mesh);
  const auto phi_weight = fem::weight_function(domain.get(), fem::Weight::kPhi);
  result.setup_seconds = seconds_since(start);

  const auto solve_start = Clock::now();
  auto record = [&](const fem::NewtonReport& report) {
    result.newton_iterations.push_back(report.iterations);
    result.final_residuals.push_back(report.residual_norms.empty() ? 0.0 : report.residual_norms.back());
    result.linear_method = report.linear_method;
  };
  if (scene.solver.mode == "stationary") {
    fem::NewtonReport report;
    U = fem::solve_newton(assembler, U, 0.0, nopts, &report);
    record(report);
  } else {
    assembler.impose_dirichlet(U.values(), 0.0);
    for (int c = 0; c < m; ++c) result.mass_initial.push_back(fem::integrate(U, c, phi_weight));
    for (int k = 1; k <= scene.solver.steps; ++k) {
      fem::NewtonReport report;
      U = fem::step_semi_implicit(assembler, U, k * scene.solver.dt, scene.solver.dt, nopts, &report);
      record(report);
    }
    result.final_time = scene.solver.steps * scene.solver.dt;
  }
  for (int c = 0; c < m; ++c) result.mass_final.push_back(fem::integrate(U, c, phi_weight));
  result.solve_seconds = seconds_since(solve_start);

  if (scene.exact) {
    const Expression exact = Expression::parse(*scene.exact);
    const double t = result.final_time;
    const fem::PointFunction f = [&](const Point& x) { return evaluate_at(exact, t, x, m); };
    result.l2_chi = fem::error_norm_L2(U, f, *domain, fem::Weight::kChi);
    result.l2_phi = fem::error_norm_L2(U, f, *domain, fem::Weight::kPhi);
  }
  result.solution = std::move(U);
  return result;
}

SolveResult cmd_solve(const Scene& scene, const CommandOptions& options) {
  const geometry::Sdf root = build_geometry(scene);
  const double eps = scene_epsilon(scene, *root);
  const Grid grid = scene_grid(scene, eps);
  if (!options.allow_coarse) check_resolution(grid, eps);

  SolveResult result = solve_scene(scene, options, eps, grid);
  const fem::DiscreteField& U = *result.solution;
  const auto& mesh = *U.mesh();
  const int m = U.components();

  const auto dir = output_directory(scene, options);
  const geometry::DomainGeometry domain(build_geometry(scene, eps), eps);
  std::vector<double> phi;
  std::vector<double> chi;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header{"x", "y"};
  for (int c = 0; c < m; ++c) header.push_back(m == 1 ? "U" : "U" + std::to_string(c));
  header.push_back("phi");
  for (int a = 0; a < mesh.num_active_vertices(); ++a) {
    const Point x = mesh.vertex(mesh.active_vertices()[static_cast<std::size_t>(a)]);
    phi.push_back(domain.phi(x));
    chi.push_back(domain.chi(x));
    std::vector<double> row{x[0], x[1]};
    const State u = U.vertex_value(a);
    for (int c = 0; c < m; ++c) row.push_back(u[c]);
    row.push_back(phi.back());
    rows.push_back(std::move(row));
  }
  std::vector<double> values(U.values().data(), U.values().data() + U.values().size());
  fem::write_vtk_unstructured(dir / "solution.vtk", mesh,
                              {{"U", std::move(values), m}, {"phi", phi, 1}, {"chi", chi, 1}});
  fem::write_csv(dir / "solution.csv", header, rows);

  json summary;
  summary["transformer"] = options.transformer.value_or(scene.transformer);
  summary["problem"] = scene.problem;
  summary["mode"] = scene.solver.mode;
  summary["epsilon"] = eps;
  summary["grid"] = {{"nx", grid.nx}, {"ny", grid.ny}, {"h", grid.h}};
  summary["active_cells"] = result.active_cells;
  summary["dofs"] = U.size();
  summary["newton_iterations"] = result.newton_iterations;
  summary["final_residuals"] = result.final_residuals;
  summary["linear_method"] = result.linear_method;
  summary["final_time"] = result.final_time;
  if (result.l2_chi) summary["l2_error_chi"] = *result.l2_chi;
  if (result.l2_phi) summary["l2_error_phi"] = *result.l2_phi;
  summary["phi_integral"] = result.mass_final;
  if (!result.mass_initial.empty()) {
    summary["phi_integral_initial"] = result.mass_initial;
    std::vector<double> drift;
    for (std::size_t c = 0; c < result.mass_final.size(); ++c) {
      const double m0 = result.mass_initial[c];
      drift.push_back(m0 != 0.0 ? std::abs(result.mass_final[c] - m0) / std::abs(m0)
                                : std::abs(result.mass_final[c]));
    }
    summary["phi_integral_relative_drift"] = drift;
  }
  summary["timings"] = {{"setup_seconds", result.setup_seconds},
                        {"solve_seconds", result.solve_seconds}};
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir / "summary.json").string());
  }
  write_manifest(dir, scene, options, {{"epsilon", eps}, {"nx", grid.nx}, {"ny", grid.ny}});
  result.files = {dir / "solution.vtk", dir / "solution.csv", dir / "summary.json",
                  dir / "manifest.json"};
  return result;
}

std::vector<ConvergenceRow> cmd_convergence(const Scene& scene, const CommandOptions& options) {
  if (!scene.exact) {
    throw Error(ErrorCode::kInvalidArgument, "convergence needs an 'exact' solution in the scene");
  }
  const std::vector<double> epsilons =
      options.epsilons.empty() ? scene.convergence_epsilons : options.epsilons;
  if (epsilons.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "convergence needs epsilons (scene convergence.epsilons or --epsilons)");
  }
  std::vector<ConvergenceRow> rows;
  for (double eps : epsilons) {
    const Grid grid = scene_grid(scene, eps, true);
    if (!options.allow_coarse) check_resolution(grid, eps);
    const SolveResult r = solve_scene(scene, options, eps, grid);
    ConvergenceRow row;
    row.epsilon = eps;
    row.h = grid.h;
    row.active_cells = r.active_cells;
    row.dofs = static_cast<int>(r.solution->size());
    for (int it : r.newton_iterations) row.newton_iterations += it;
    row.l2_chi = *r.l2_chi;
    row.l2_phi = *r.l2_phi;
    rows.push_back(row);
  }
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    table.push_back({r.epsilon, r.h, static_cast<double>(r.active_cells), static_cast<double>(r.dofs),
                     static_cast<double>(r.newton_iterations), r.l2_chi, r.l2_phi});
  }
  const auto dir = output_directory(scene, options);
  fem::write_csv(dir / "convergence.csv",
                 {"epsilon", "h", "active_cells", "dofs", "newton_iterations", "l2_error_chi",
                  "l2_error_phi"},
                 table);
  write_manifest(dir, scene, options, {{"epsilons", epsilons}});
  return rows;
}

std::vector<Check> cmd_validate(const Scene& scene, const CommandOptions& options) {
  std::vector<Check> checks;
  auto add = [&](std::string name, bool passed, std::string detail) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s << std::setprecision(3) << v;
    return s.str();
  };

  const geometry::Sdf root = build_geometry(scene);
  try {
    geometry::check_unique_names(*root);
    add("unique_names", true, std::to_string(geometry::collect_names(*root).size()) + " named nodes");
  } catch (const Error& e) {
    add("unique_names", false, e.what());
  }

  const double eps = scene_epsilon(scene, *root);
  auto domain = std::make_shared<const geometry::DomainGeometry>(root, eps);
  const Grid grid = scene_grid(scene, eps);
  {
    const bool fine = grid.h <= 0.5 * eps * (1.0 + 1e-12);
    add("resolution", fine || options.allow_coarse,
        "h = " + fmt(grid.h) + ", eps / 2 = " + fmt(0.5 * eps) +
            (fine ? "" : (options.allow_coarse ? " (coarse grid allowed)" : "")));
  }

  const auto points = halton_points(scene, 4096);

  {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < points.size(); k += 2) {
      const double dr = std::abs(root->value(points[k]) - root->value(points[k + 1]));
      const double dx = (points[k] - points[k + 1]).norm();
      worst = std::max(worst, dr / dx);
    }
    add("lipschitz", worst <= 1.0 + 1e-9, "max |r(a) - r(b)| / |a - b| = " + fmt(worst));
  }

  {
    double worst_phi = 0.0;
    bool in_range = true;
    for (const auto& x : points) {
      const double r = root->value(x);
      const double p = geometry::phase_field(r, eps);
      in_range = in_range && p >= 0.0 && p <= 1.0;
      worst_phi = std::max(worst_phi, std::abs(p + geometry::phase_field(-r, eps) - 1.0));
    }
    add("phase_field", in_range && worst_phi <= 1e-14,
        "phi in [0, 1]: " + std::string(in_range ? "yes" : "no") +
            ", max |phi(r) + phi(-r) - 1| = " + fmt(worst_phi));
  }

  {
    int band = 0;
    int moved_away = 0;
    double worst = 0.0;
    for (const auto& x : points) {
      const double r = root->value(x);
      if (std::abs(r) > eps) continue;
      ++band;
      const double residual = std::abs(root->value(geometry::boundary_projection(*root, x)));
      worst = std::max(worst, residual);
      if (residual > std::abs(r) + 1e-12) ++moved_away;
    }
    add("projection", moved_away == 0,
        std::to_string(band) + " band points, max |r(P x)| = " + fmt(worst) + ", " +
            std::to_string(moved_away) + " moved away from the boundary");
  }

  const auto segments = diffuse_segments(scene);
  std::shared_ptr<const boundary::BoundaryTerms> terms;
  try {
    terms = scene_terms(scene, domain);
    add("segments", true, std::to_string(segments.size()) + " diffuse segments resolved");
  } catch (const Error& e) {
    add("segments", false, e.what());
  }

  if (terms && !segments.empty()) {
    double worst = 0.0;
    bool bounded = true;
    for (const auto& x : points) {
      if (std::abs(root->value(x)) > 10.0 * eps) continue;
      double sum = 0.0;
      for (double w : terms->normalized_weights(x)) {
        sum += w;
        bounded = bounded && w >= 0.0 && w <= 1.0 + 1e-15;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    add("partition_of_unity", bounded && worst <= 1e-12,
        "max |sum w_i - 1| = " + fmt(worst));

    bool resolved = true;
    std::string detail;
    for (const auto& s : terms->segments()) {
      const double seps = domain->segment_epsilon(*s.node);
      resolved = resolved && grid.h <= 0.5 * seps * (1.0 + 1e-12);
      detail += (detail.empty() ? "" : ", ") + s.label + " eps = " + fmt(seps);
    }
    add("segment_resolution", resolved || options.allow_coarse, detail);
  }
  return checks;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffuse-domain finite element solver"};
  app.name("ddfem");
  app.set_version_flag("--version", DDFEM_VERSION);
  app.require_subcommand(1);

  std::string scene_path;
  CommandOptions options;
  std::string transformer;
  std::string out_dir;
  std::string field;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scene", scene_path, "Scene file (JSON)")->required();
    sub->add_option("--transformer", transformer, "Diffuse-domain transformer (default: scene or ddm1)");
    sub->add_option("--out", out_dir, "Output directory (default: scene output)");
    sub->add_flag("--allow-coarse", options.allow_coarse, "Accept grids with h > epsilon / 2");
  };
  auto* render = app.add_subcommand("render", "Sample a geometry field on the scene grid");
  common(render);
  render->add_option("--field", field, "sdf, chi, phi, surface_delta or weight:<segment>");
  auto* solve = app.add_subcommand("solve", "Transform and solve the scene problem");
  common(solve);
  auto* convergence = app.add_subcommand("convergence", "Error table over a list of epsilons");
  common(convergence);
  convergence->add_option("--epsilons", options.epsilons, "Interface widths (default: scene list)");
  auto* validate = app.add_subcommand("validate", "Geometry and boundary diagnostics");
  common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (!transformer.empty()) options.transformer = transformer;
  if (!out_dir.empty()) options.out = out_dir;
  if (!field.empty()) options.field = field;

  try {
    const Scene scene = load_scene(scene_path);
    if (render->parsed()) {
      options.command = "render";
      const RenderResult r = cmd_render(scene, options);
      write_manifest(output_directory(scene, options), scene, options,
                     {{"field", r.field}, {"nx", r.nx}, {"ny", r.ny}});
      announce(out, r.files);
    } else if (solve->parsed()) {
      options.command = "solve";
      const SolveResult r = cmd_solve(scene, options);
      int iterations = 0;
      for (int it : r.newton_iterations) iterations += it;
      out << "solved: " << r.active_cells << " active cells, " << iterations
          << " Newton iterations (" << r.linear_method << ")\n";
      if (r.l2_chi) out << "L2 error (chi): " << fem::format_double(*r.l2_chi) << "\n";
      announce(out, r.files);
    } else if (convergence->parsed()) {
      options.command = "convergence";
      const auto rows = cmd_convergence(scene, options);
      out << "epsilon,h,active_cells,l2_error_chi,l2_error_phi\n";
      for (const auto& r : rows) {
        out << fem::format_double(r.epsilon) << "," << fem::format_double(r.h) << ","
            << r.active_cells << "," << fem::format_double(r.l2_chi) << ","
            << fem::format_double(r.l2_phi) << "\n";
      }
      announce(out, {output_directory(scene, options) / "convergence.csv"});
    } else if (validate->parsed()) {
      options.command = "validate";
      const auto checks = cmd_validate(scene, options);
      bool ok = true;
      for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 3;
    }
  } catch (const Error& e) {
    err << "ddfem: error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.is_numerical() ? 3 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ddfem: error [io]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ddfem::cli
