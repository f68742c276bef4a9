#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddfem/fem/field.hpp"
#include "ddfem/fem/solvers.hpp"
#include "scene.hpp"

namespace ddfem::cli {

/// Command line settings that override the scene file.
struct CommandOptions {
  std::optional<std::string> transformer;
  std::optional<std::filesystem::path> out;
  bool allow_coarse = false;
  std::optional<std::string> field;   // render
  std::vector<double> epsilons;       // convergence
  std::string command;                // echoed in the manifest
};

struct RenderResult {
  std::string field;
  int nx = 0;  // sample points per axis
  int ny = 0;
  std::vector<Point> points;  // x fastest
  std::vector<double> values;
  std::vector<std::filesystem::path> files;
};

/// Samples sdf, chi, phi, surface_delta or weight:<segment> on the scene grid
/// and writes render_<field>.vtk / .csv.
RenderResult cmd_render(const Scene& scene, const CommandOptions& options);

struct SolveResult {
  std::optional<fem::DiscreteField> solution;
  double epsilon = 0.0;
  Grid grid;
  int active_cells = 0;
  double final_time = 0.0;
  /// Newton iterations per solve (one entry per time step in time mode).
  std::vector<int> newton_iterations;
  std::vector<double> final_residuals;
  std::string linear_method;
  std::optional<double> l2_chi;
  std::optional<double> l2_phi;
  /// int phi U_c before the first and after the last step.
  std::vector<double> mass_initial;
  std::vector<double> mass_final;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<std::filesystem::path> files;
};

/// Mesh, filter, transform and solve at the given epsilon and grid without
/// writing files.
SolveResult solve_scene(const Scene& scene, const CommandOptions& options, double epsilon,
                        const Grid& grid);

/// solve_scene at the scene epsilon and grid, then writes solution.vtk,
/// solution.csv and summary.json.
SolveResult cmd_solve(const Scene& scene, const CommandOptions& options);

struct ConvergenceRow {
  double epsilon = 0.0;
  double h = 0.0;
  int active_cells = 0;
  int dofs = 0;
  int newton_iterations = 0;
  double l2_chi = 0.0;
  double l2_phi = 0.0;
};

/// One solve per epsilon with h = h_factor * epsilon; writes convergence.csv.
std::vector<ConvergenceRow> cmd_convergence(const Scene& scene, const CommandOptions& options);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Geometry and boundary diagnostics of a scene.
std::vector<Check> cmd_validate(const Scene& scene, const CommandOptions& options);

/// Output directory: --out, else the scene's output entry.
std::filesystem::path output_directory(const Scene& scene, const CommandOptions& options);

/// Writes manifest.json (scene hash, parameters, version) into `dir`.
void write_manifest(const std::filesystem::path& dir, const Scene& scene,
                    const CommandOptions& options, const nlohmann::json& extra = {});

/// Entry point of the ddfem executable. Returns 0 on success, 2 for user or
/// configuration errors, 3 for numerical failures and failed validation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddfem::cli
