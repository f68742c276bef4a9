#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "ddfem/geometry/sdf.hpp"
#include "ddfem/types.hpp"

namespace ddfem::fem {

/// Edge of the active region's boundary, oriented counter-clockwise with
/// respect to its cell.
struct BoundaryFacet {
  int v0 = 0;
  int v1 = 0;
  int cell = 0;
};

/// Uniform triangulation of an axis-aligned rectangle. Each of the nx * ny
/// quads is split along its lower-left to upper-right diagonal into two
/// counter-clockwise triangles; cell 2 * (j * nx + i) + k, k in {0, 1}.
/// Vertex (i, j) has index j * (nx + 1) + i.
class StructuredMesh {
 public:
  StructuredMesh(Point lower, Point upper, int nx, int ny);

  const Point& lower() const noexcept { return lower_; }
  const Point& upper() const noexcept { return upper_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  /// Grid spacing max(hx, hy), the h of the h <= eps / 2 resolution rule.
  double h() const noexcept;

  int num_vertices() const noexcept { return (nx_ + 1) * (ny_ + 1); }
  int num_cells() const noexcept { return 2 * nx_ * ny_; }
  Point vertex(int v) const;
  std::array<int, 3> cell(int c) const;
  double cell_area(int) const noexcept { return 0.5 * hx_ * hy_; }

  bool active(int c) const { return active_[static_cast<std::size_t>(c)] != 0; }
  const std::vector<int>& active_cells() const noexcept { return active_cells_; }
  int num_active_cells() const noexcept { return static_cast<int>(active_cells_.size()); }
  double active_area() const noexcept { return cell_area(0) * num_active_cells(); }

  /// Compact numbering of the vertices touched by active cells, in
  /// increasing global order; -1 for unused vertices.
  int active_index(int v) const { return active_index_[static_cast<std::size_t>(v)]; }
  int num_active_vertices() const noexcept { return static_cast<int>(active_vertices_.size()); }
  const std::vector<int>& active_vertices() const noexcept { return active_vertices_; }

  /// Facets with exactly one active neighbouring cell, sorted by (v0, v1).
  const std::vector<BoundaryFacet>& boundary_facets() const noexcept { return facets_; }

  /// Number of connected components of the active cells (edge adjacency).
  int active_components() const;

  /// Copy with the given cells deactivated.
  StructuredMesh with_active(std::vector<std::uint8_t> mask) const;

 private:
  void rebuild();

  Point lower_;
  Point upper_;
  int nx_;
  int ny_;
  double hx_;
  double hy_;
  std::vector<std::uint8_t> active_;
  std::vector<int> active_cells_;
  std::vector<int> active_index_;
  std::vector<int> active_vertices_;
  std::vector<BoundaryFacet> facets_;
};

using MeshPtr = std::shared_ptr<const StructuredMesh>;

/// Throws Error(kInvalidArgument) unless lower < upper componentwise and
/// n >= 2 on each axis. Only 2D meshes are supported.
MeshPtr build_mesh(const Point& lower, const Point& upper, int nx, int ny);
MeshPtr build_mesh(const Point& lower, const Point& upper, int n);

/// Deactivates every cell whose vertices all have sdf > threshold. Throws
/// Error(kInvalidArgument) if the remaining cells are empty or not
/// edge-connected.
MeshPtr filter_cells(const StructuredMesh& mesh, const geometry::SdfNode& sdf, double threshold);
/// Threshold 10 * epsilon of the SDF.
MeshPtr filter_cells(const StructuredMesh& mesh, const geometry::SdfNode& sdf);

}  // namespace ddfem::fem
