#include "ddfem/model/weak_form.hpp"

#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::model {

void validate(const PdeModel& model) {
  if (model.components < 1 || model.components > kMaxComponents) {
    throw Error(ErrorCode::kInvalidModel,
                "model has " + std::to_string(model.components) + " components; supported 1.." +
                    std::to_string(kMaxComponents));
  }
  if (model.dim < 1 || model.dim > kMaxDim) {
    throw Error(ErrorCode::kInvalidModel,
                "model dimension " + std::to_string(model.dim) + " is not supported");
  }
  if (!model.has_convective_flux() && !model.has_viscous_flux() &&
      !model.has_implicit_source() && !model.has_explicit_source()) {
    throw Error(ErrorCode::kInvalidModel,
                "model defines none of F_c, F_v, S_i, S_e; at least one is required");
  }
}

WeakFormResidual::WeakFormResidual(const PdeModel& model, double time)
    : components_(model.components),
      dim_(model.dim),
      time_(time),
      convective_flux_(model.convective_flux),
      viscous_flux_(model.viscous_flux),
      implicit_source_(model.implicit_source),
      explicit_source_(model.explicit_source),
      mass_weight_(model.mass_weight) {
  validate(model);
  for (const auto& entry : model.boundary.entries()) {
    if (boundary::is_diffuse(entry.key)) {
      if (boundary::is_dirichlet(entry.condition)) {
        throw Error(ErrorCode::kUntransformed,
                    "model has a Dirichlet condition on a diffuse boundary segment; apply a "
                    "diffuse-domain transformer (e.g. ddm1) before building the weak form");
      }
      continue;
    }
    mesh_conditions_.push_back(
        {std::get<boundary::MeshPredicate>(entry.key), entry.condition});
  }
}

Flux WeakFormResidual::implicit_flux(double t, const Point& x, const State& U,
                                     const Flux& DU) const {
  if (viscous_flux_) return viscous_flux_(t, x, U, DU);
  return Flux::Zero(components_, dim_);
}

Flux WeakFormResidual::explicit_flux(double t, const Point& x, const State& U) const {
  if (convective_flux_) return -convective_flux_(t, x, U);
  return Flux::Zero(components_, dim_);
}

State WeakFormResidual::implicit_source(double t, const Point& x, const State& U,
                                        const Flux& DU) const {
  if (implicit_source_) return implicit_source_(t, x, U, DU);
  return State::Zero(components_);
}

State WeakFormResidual::explicit_source(double t, const Point& x, const State& U,
                                        const Flux& DU) const {
  if (explicit_source_) return explicit_source_(t, x, U, DU);
  return State::Zero(components_);
}

Flux WeakFormResidual::flux(double t, const Point& x, const State& U, const Flux& DU) const {
  return implicit_flux(t, x, U, DU) + explicit_flux(t, x, U);
}

State WeakFormResidual::source(double t, const Point& x, const State& U, const Flux& DU) const {
  return implicit_source(t, x, U, DU) + explicit_source(t, x, U, DU);
}

double WeakFormResidual::integrand(double t, const Point& x, const State& U, const Flux& DU,
                                   const State& v, const Flux& Dv) const {
  if (U.size() != components_ || v.size() != components_ || DU.rows() != components_ ||
      DU.cols() != dim_ || Dv.rows() != components_ || Dv.cols() != dim_) {
    std::ostringstream msg;
    msg << "integrand arguments do not match a " << components_ << "-component " << dim_
        << "D form";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  return flux(t, x, U, DU).cwiseProduct(Dv).sum() - source(t, x, U, DU).dot(v);
}

std::vector<MeshBoundaryCondition> WeakFormResidual::dirichlet_constraints() const {
  std::vector<MeshBoundaryCondition> out;
  for (const auto& c : mesh_conditions_) {
    if (boundary::is_dirichlet(c.condition)) out.push_back(c);
  }
  return out;
}

WeakFormResidual model_to_weak_form(const PdeModel& model, double t) {
  return WeakFormResidual(model, t);
}

double evaluate_residual_integrand(const WeakFormResidual& form, double t, const Point& x,
                                   const State& U, const Flux& DU, const State& v,
                                   const Flux& Dv) {
  return form.integrand(t, x, U, DU, v, Dv);
}

}  // namespace ddfem::model
