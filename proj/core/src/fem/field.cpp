#include "ddfem/fem/field.hpp"

#include <cmath>

#include "ddfem/error.hpp"

namespace ddfem::fem {

DiscreteField::DiscreteField(MeshPtr mesh, int components)
    : DiscreteField(mesh, components,
                    Eigen::VectorXd::Zero(mesh ? static_cast<Eigen::Index>(mesh->num_active_vertices()) *
                                                     components
                                               : 0)) {}

DiscreteField::DiscreteField(MeshPtr mesh, int components, Eigen::VectorXd values)
    : mesh_(std::move(mesh)), components_(components), values_(std::move(values)) {
  if (!mesh_) throw Error(ErrorCode::kInvalidArgument, "field needs a mesh");
  if (components_ < 1 || components_ > kMaxComponents) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported component count " + std::to_string(components_));
  }
  const auto expected = static_cast<Eigen::Index>(mesh_->num_active_vertices()) * components_;
  if (values_.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch, "field has " + std::to_string(values_.size()) +
                                                   " values, mesh needs " +
                                                   std::to_string(expected));
  }
}

DiscreteField DiscreteField::interpolate(MeshPtr mesh, int components,
                                         const std::function<State(const Point&)>& f) {
  DiscreteField out(mesh, components);
  const auto& verts = out.mesh_->active_vertices();
  for (std::size_t a = 0; a < verts.size(); ++a) {
    const State v = f(out.mesh_->vertex(verts[a]));
    if (v.size() != components) {
      throw Error(ErrorCode::kDimensionMismatch, "interpolated function has the wrong size");
    }
    out.values_.segment(static_cast<Eigen::Index>(a) * components, components) = v;
  }
  return out;
}

State DiscreteField::vertex_value(int active_vertex) const {
  return values_.segment(static_cast<Eigen::Index>(active_vertex) * components_, components_);
}

State DiscreteField::evaluate(int cell, const std::array<double, 3>& lambda) const {
  const auto v = mesh_->cell(cell);
  State out = State::Zero(components_);
  for (std::size_t k = 0; k < 3; ++k) {
    const int a = mesh_->active_index(v[k]);
    if (a < 0) throw Error(ErrorCode::kInvalidArgument, "cell is not active");
    out += lambda[k] * vertex_value(a);
  }
  return out;
}

Flux DiscreteField::gradient(int cell) const {
  const auto geo = cell_geometry(*mesh_, cell);
  const auto v = mesh_->cell(cell);
  Flux out = Flux::Zero(components_, 2);
  for (std::size_t k = 0; k < 3; ++k) {
    const int a = mesh_->active_index(v[k]);
    if (a < 0) throw Error(ErrorCode::kInvalidArgument, "cell is not active");
    out += vertex_value(a) * geo.basis_gradients[k].transpose();
  }
  return out;
}

CellGeometry cell_geometry(const StructuredMesh& mesh, int cell) {
  CellGeometry g;
  const auto v = mesh.cell(cell);
  for (std::size_t k = 0; k < 3; ++k) g.vertices[k] = mesh.vertex(v[k]);
  const Point e1 = g.vertices[1] - g.vertices[0];
  const Point e2 = g.vertices[2] - g.vertices[0];
  const double det = e1[0] * e2[1] - e1[1] * e2[0];
  g.area = 0.5 * std::abs(det);
  // Rows of the inverse Jacobian give grad lambda_1 and grad lambda_2.
  g.basis_gradients[1] = make_point({e2[1] / det, -e2[0] / det});
  g.basis_gradients[2] = make_point({-e1[1] / det, e1[0] / det});
  g.basis_gradients[0] = -(g.basis_gradients[1] + g.basis_gradients[2]);
  return g;
}

}  // namespace ddfem::fem
