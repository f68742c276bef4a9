#pragma once

#include <functional>
#include <optional>

#include "ddfem/boundary/conditions.hpp"
#include "ddfem/types.hpp"

namespace ddfem::model {

using ConvectiveFluxFn = std::function<Flux(double t, const Point& x, const State& U)>;
using ViscousFluxFn =
    std::function<Flux(double t, const Point& x, const State& U, const Flux& DU)>;
using SourceFn = std::function<State(double t, const Point& x, const State& U, const Flux& DU)>;
using WeightFn = std::function<double(double t, const Point& x)>;

/// Second-order evolution problem in divergence form
///
///   d_t U = -div(F_c(U) - F_v(U, DU)) + S_i(U, DU) + S_e(U, DU),
///
/// with every term optionally depending on (t, x). State and coefficients are
/// vector valued; a scalar problem has components == 1. An empty callable
/// means the term is absent. In IMEX time stepping F_v and S_i are implicit,
/// F_c and S_e explicit.
struct PdeModel {
  int components = 1;
  int dim = 2;
  ConvectiveFluxFn convective_flux;
  ViscousFluxFn viscous_flux;
  SourceFn implicit_source;
  SourceFn explicit_source;
  boundary::BoundaryMap boundary;
  /// Optional weight w of the time derivative, w d_t U = ...; empty means 1.
  /// Diffuse-domain transformers set it to phi.
  WeightFn mass_weight;
  /// Scaling of the Dirichlet penalty placed in S_i / S_e by transformers.
  std::optional<double> out_factor_implicit;
  std::optional<double> out_factor_explicit;

  bool has_convective_flux() const { return static_cast<bool>(convective_flux); }
  bool has_viscous_flux() const { return static_cast<bool>(viscous_flux); }
  bool has_implicit_source() const { return static_cast<bool>(implicit_source); }
  bool has_explicit_source() const { return static_cast<bool>(explicit_source); }
};

/// Throws Error(kInvalidModel) unless at least one term is present and the
/// sizes are supported.
void validate(const PdeModel& model);

}  // namespace ddfem::model
