#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddfem/fem/mesh.hpp"
#include "ddfem/geometry/domain.hpp"
#include "ddfem/model/problems.hpp"
#include "ddfem/transform/transform.hpp"

namespace ddfem::cli {

struct BoundarySpec {
  std::string segment;  // node name, or "mesh" for the computational boundary
  std::string type;     // dirichlet | flux_c | flux_v | flux_pair
  std::string value;    // dirichlet, flux_c, flux_v data; convective part of a pair
  std::string viscous;  // viscous part of a pair
  std::string where;    // optional mesh selector expression over x
};

struct SolverSpec {
  std::string mode = "stationary";  // stationary | time
  double dt = 1e-3;
  int steps = 0;
  std::string initial = "0";
  double tolerance = 1e-9;
  int max_iterations = 25;
};

/// Parsed scene file; see docs/scene-format.md.
struct Scene {
  nlohmann::json raw;
  std::string text;
  std::filesystem::path path;

  nlohmann::json geometry;
  std::optional<double> epsilon;
  Point lower;
  Point upper;
  std::optional<std::array<int, 2>> resolution;
  std::optional<double> h;
  bool filter = true;
  std::optional<double> filter_threshold;

  std::string problem = "poisson";
  model::CoefficientOverrides coefficients;
  std::vector<BoundarySpec> boundary;
  std::string transformer = "ddm1";
  std::optional<double> out_factor_i;
  std::optional<double> out_factor_e;
  double penalty_exponent = 3.0;

  SolverSpec solver;
  std::optional<std::string> exact;
  std::vector<double> convergence_epsilons;
  double h_factor = 0.5;

  std::string render_field = "phi";
  std::optional<std::array<int, 2>> render_resolution;
  std::string output = "out";
};

/// Throws Error(kParse) or Error(kIo) with a readable message.
Scene parse_scene(const nlohmann::json& json, std::filesystem::path path = {});
Scene load_scene(const std::filesystem::path& path);

/// Geometry tree of the scene; `epsilon` (or the scene epsilon) is set on
/// the root and propagated to every node.
geometry::Sdf build_geometry(const Scene& scene, std::optional<double> epsilon = std::nullopt);

/// Built-in problem with coefficient overrides, boundary map and outFactors.
model::PdeModel build_model(const Scene& scene, int dim);

/// Mesh of the scene box: explicit resolution, else explicit h, else
/// h = h_factor * epsilon.
struct Grid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;  // max(hx, hy)
};
Grid scene_grid(const Scene& scene, double epsilon, bool use_h_factor = false);

/// Throws Error(kInvalidArgument) unless h <= epsilon / 2.
void check_resolution(const Grid& grid, double epsilon);

/// 64-bit FNV-1a of the bytes.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace ddfem::cli
