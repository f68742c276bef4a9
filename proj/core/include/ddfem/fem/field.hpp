#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "ddfem/fem/mesh.hpp"

namespace ddfem::fem {

/// P1 degrees of freedom on the active vertices of a mesh, interleaved by
/// component: dof(a, c) = a * m + c for active vertex a.
class DiscreteField {
 public:
  DiscreteField(MeshPtr mesh, int components);
  DiscreteField(MeshPtr mesh, int components, Eigen::VectorXd values);

  /// Nodal interpolant of f.
  static DiscreteField interpolate(MeshPtr mesh, int components,
                                   const std::function<State(const Point&)>& f);

  const MeshPtr& mesh() const noexcept { return mesh_; }
  int components() const noexcept { return components_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  State vertex_value(int active_vertex) const;
  /// Value at barycentric coordinates `lambda` of an active cell.
  State evaluate(int cell, const std::array<double, 3>& lambda) const;
  /// Constant gradient on a cell, m x 2.
  Flux gradient(int cell) const;

 private:
  MeshPtr mesh_;
  int components_;
  Eigen::VectorXd values_;
};

/// Barycentric gradients of the three P1 basis functions of a cell (rows)
/// and the cell area.
struct CellGeometry {
  std::array<Point, 3> vertices;
  std::array<Point, 3> basis_gradients;
  double area = 0.0;
};
CellGeometry cell_geometry(const StructuredMesh& mesh, int cell);

}  // namespace ddfem::fem
