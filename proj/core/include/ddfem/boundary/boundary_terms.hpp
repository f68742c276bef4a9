#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddfem/boundary/conditions.hpp"
#include "ddfem/geometry/domain.hpp"

namespace ddfem::boundary {

/// Which fluxes the model defines; decides which flux wrappers are legal.
struct FluxPresence {
  bool convective = false;
  bool viscous = false;
};

/// Geometry shared by every segment evaluation at one point x.
struct BoundaryPoint {
  Point x;
  Point projected;  // closest point on the boundary of Omega
  Point external;   // x inside Omega, projected outside
  double r = 0.0;
  double phi = 0.0;
  double phi_complement = 0.0;  // 1 - phi without cancellation
  double surface_delta = 0.0;  // |grad phi|
  Point normal;
  std::vector<double> weights;  // normalised, one per segment
};

/// Diffuse boundary segments of a domain with their normalised weights and
/// the weighted boundary sums consumed by diffuse-domain transformers:
///
///   G_V  = sum_{i in I_V} w_i g_i(P x)
///   G_Fc = sum_{i in I_F} w_i g_c,i(P x) |grad phi|
///   G_Fv = sum_{i in I_F} w_i g_v,i(P x) |grad phi|
///
/// where P is the boundary projection of the full domain and w_i the
/// normalised projected weights. Immutable after construction.
class BoundaryTerms {
 public:
  struct Segment {
    geometry::Sdf node;
    std::string label;
    BoundaryCondition condition;
  };

  /// Resolves the diffuse keys of `map` against the domain tree and checks
  /// each flux wrapper against `fluxes`. Mesh-predicate entries are kept
  /// aside, unchanged, in physical().
  BoundaryTerms(std::shared_ptr<const geometry::DomainGeometry> domain, const BoundaryMap& map,
                FluxPresence fluxes);

  const geometry::DomainGeometry& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const geometry::DomainGeometry>& domain_ptr() const noexcept {
    return domain_;
  }
  std::span<const Segment> segments() const noexcept { return segments_; }
  /// I_V and I_F as indices into segments().
  const std::vector<std::size_t>& dirichlet_indices() const noexcept { return dirichlet_; }
  const std::vector<std::size_t>& flux_indices() const noexcept { return flux_; }
  bool has_dirichlet() const noexcept { return !dirichlet_.empty(); }
  bool has_flux() const noexcept { return !flux_.empty(); }
  /// Mesh-boundary entries of the original map.
  const BoundaryMap& physical() const noexcept { return physical_; }

  BoundaryPoint at(const Point& x) const;
  /// Like at(), but memoises the last few points per thread. Coefficient
  /// wrappers hit the same quadrature point repeatedly during assembly.
  const BoundaryPoint& cached_at(const Point& x) const;

  /// Unnormalised projected weight of segment i.
  double segment_weight(std::size_t i, const Point& x) const;
  std::vector<double> normalized_weights(const Point& x) const;
  /// g(t, P x): boundary data extended constantly along normals.
  State extend_value(const ValueFn& g, double t, const Point& x) const;

  // Each returns nullopt when its index set is empty.
  std::optional<State> bnd_value_ext(double t, const BoundaryPoint& p) const;
  std::optional<State> jump_v(double t, const BoundaryPoint& p, const State& U) const;
  std::optional<State> bnd_flux_c_ext(double t, const BoundaryPoint& p, const State& U) const;
  std::optional<State> bnd_flux_v_ext(double t, const BoundaryPoint& p, const State& U,
                                      const Flux& DU) const;
  /// sum_{i in I_F} w_i (F_v n - g_v,i) |grad phi| for a given F_v value.
  std::optional<State> jump_fv(double t, const BoundaryPoint& p, const State& U,
                               const Flux& DU, const Flux& viscous_flux) const;

  std::optional<State> bnd_value_ext(double t, const Point& x) const {
    return bnd_value_ext(t, at(x));
  }
  std::optional<State> jump_v(double t, const Point& x, const State& U) const {
    return jump_v(t, at(x), U);
  }
  std::optional<State> bnd_flux_c_ext(double t, const Point& x, const State& U) const {
    return bnd_flux_c_ext(t, at(x), U);
  }
  std::optional<State> bnd_flux_v_ext(double t, const Point& x, const State& U,
                                      const Flux& DU) const {
    return bnd_flux_v_ext(t, at(x), U, DU);
  }

 private:
  std::vector<double> normalize(std::vector<double> w) const;

  std::shared_ptr<const geometry::DomainGeometry> domain_;
  std::uint64_t id_;
  std::vector<Segment> segments_;
  std::vector<double> segment_epsilons_;
  std::vector<std::size_t> dirichlet_;
  std::vector<std::size_t> flux_;
  BoundaryMap physical_;
};

}  // namespace ddfem::boundary
