#pragma once

#include <vector>

#include "ddfem/model/pde_model.hpp"

namespace ddfem::model {

struct MeshBoundaryCondition {
  boundary::MeshPredicate region;
  boundary::BoundaryCondition condition;
};

/// Pointwise residual of the weak form
///
///   r(U; v) = (F_v - F_c) : grad v - (S_i + S_e) . v
///
/// plus the conditions on the computational mesh boundary. Absent terms are
/// zero. Flux conditions on the mesh boundary contribute (g_c - g_v) . v on
/// the facets they select.
class WeakFormResidual {
 public:
  WeakFormResidual(const PdeModel& model, double time);

  int components() const noexcept { return components_; }
  int dim() const noexcept { return dim_; }
  double time() const noexcept { return time_; }

  /// F_v - F_c at a point.
  Flux flux(double t, const Point& x, const State& U, const Flux& DU) const;
  /// S_i + S_e at a point.
  State source(double t, const Point& x, const State& U, const Flux& DU) const;

  // Implicit / explicit split used by semi-implicit stepping.
  Flux implicit_flux(double t, const Point& x, const State& U, const Flux& DU) const;
  Flux explicit_flux(double t, const Point& x, const State& U) const;
  State implicit_source(double t, const Point& x, const State& U, const Flux& DU) const;
  State explicit_source(double t, const Point& x, const State& U, const Flux& DU) const;

  /// Weight of the time derivative at x (1 if the model has none).
  double mass_weight(double t, const Point& x) const {
    return mass_weight_ ? mass_weight_(t, x) : 1.0;
  }

  double integrand(double t, const Point& x, const State& U, const Flux& DU, const State& v,
                   const Flux& Dv) const;

  /// Ordered; the first entry whose predicate matches a facet or vertex wins.
  const std::vector<MeshBoundaryCondition>& mesh_conditions() const noexcept {
    return mesh_conditions_;
  }
  std::vector<MeshBoundaryCondition> dirichlet_constraints() const;

 private:
  int components_;
  int dim_;
  double time_;
  ConvectiveFluxFn convective_flux_;
  ViscousFluxFn viscous_flux_;
  SourceFn implicit_source_;
  SourceFn explicit_source_;
  WeightFn mass_weight_;
  std::vector<MeshBoundaryCondition> mesh_conditions_;
};

/// Converts a model into its weak-form residual. Diffuse flux entries are
/// ignored; a diffuse Dirichlet entry is rejected with kUntransformed since
/// it must first be absorbed by a diffuse-domain transformer.
WeakFormResidual model_to_weak_form(const PdeModel& model, double t = 0.0);

double evaluate_residual_integrand(const WeakFormResidual& form, double t, const Point& x,
                                   const State& U, const Flux& DU, const State& v,
                                   const Flux& Dv);

}  // namespace ddfem::model
