#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddfem/boundary/boundary_terms.hpp"
#include "ddfem/geometry/domain.hpp"
#include "ddfem/model/pde_model.hpp"

namespace ddfem::transform {

using DomainPtr = std::shared_ptr<const geometry::DomainGeometry>;
using BoundaryTermsPtr = std::shared_ptr<const boundary::BoundaryTerms>;

struct TransformOptions {
  /// Exponent p of the Dirichlet penalty (1 - phi) / eps^p.
  double penalty_exponent = 3.0;
};

struct Pretransformed {
  /// Coefficients evaluated at the external projection of x; boundary map
  /// reduced to mesh entries plus the default outer condition.
  model::PdeModel model;
  BoundaryTermsPtr terms;
};

/// Builds the boundary terms, extends every coefficient off Omega by
/// external projection and installs the default condition on the mesh
/// boundary outside Omega (Dirichlet G_V if any diffuse Dirichlet segment
/// exists, otherwise the flux pair (-G_Fc, G_Fv)).
Pretransformed pretransform(const model::PdeModel& model, DomainPtr domain);

/// Which input pieces exist; decides what the composed model may expose.
struct ModelPieces {
  bool convective_flux = false;
  bool viscous_flux = false;
  bool implicit_source = false;
  bool explicit_source = false;
  std::optional<double> out_factor_implicit;
  std::optional<double> out_factor_explicit;

  static ModelPieces of(const model::PdeModel& model);
};

/// Raw transformer output: one callable per composable method. Empty
/// callables are methods the transformer does not provide.
struct DdmComponents {
  int components = 1;
  int dim = 2;
  ModelPieces input;
  model::SourceFn explicit_source_term;  // S_e_source
  model::SourceFn explicit_convection;   // S_e_convection
  model::SourceFn outside;               // S_outside
  model::SourceFn implicit_source_term;  // S_i_source
  model::SourceFn implicit_diffusion;    // S_i_diffusion
  model::ConvectiveFluxFn convective_flux;
  model::ViscousFluxFn viscous_flux;
  /// Weight of the time derivative, phi for DDM1.
  model::WeightFn mass_weight;
  boundary::BoundaryMap boundary;
  DomainPtr domain;
  BoundaryTermsPtr terms;
};

/// Names of the methods summed into each slot of the final model.
struct SourceComposition {
  std::vector<std::string> explicit_source;
  std::vector<std::string> implicit_source;
  bool convective_flux = false;
  bool viscous_flux = false;

  bool operator==(const SourceComposition&) const = default;
};

struct TransformedModel {
  model::PdeModel model;
  DomainPtr domain;
  BoundaryTermsPtr terms;
  std::string transformer;
  SourceComposition composition;
  DdmComponents components;
};

/// Composes the final model from the raw components:
///   S_e <- S_e_source [S_e] + S_e_convection [F_c] + outFactor_e S_outside [outFactor_e]
///   S_i <- S_i_source [S_i] + S_i_diffusion [F_v] + outFactor_i S_outside [outFactor_i]
///   F_c <- F_c [F_c],  F_v <- F_v [F_v]
/// where [.] is the requirement on the input model. Methods whose
/// requirement fails are not exposed at all.
TransformedModel posttransform(const DdmComponents& raw, std::string transformer);
SourceComposition compose(const DdmComponents& raw);

/// DDM1: phi-weighted time derivative, fluxes and sources, a
/// (1 - phi)/eps^3 Dirichlet penalty and |grad phi|-weighted flux boundary
/// data.
TransformedModel ddm1_transform(const model::PdeModel& model, DomainPtr domain,
                                const TransformOptions& options = {});

}  // namespace ddfem::transform
