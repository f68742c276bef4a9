#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ddfem/geometry/sdf.hpp"

namespace ddfem::geometry {

/// phi(r) = (1 - tanh(3 r / eps)) / 2.
double phase_field(double r, double epsilon);
/// 1 - phi(r), computed without cancellation deep inside the domain.
double phase_field_complement(double r, double epsilon);
/// |d phi / d r| = 3 / (2 eps) * sech^2(3 r / eps), evaluated without overflow.
double phase_field_slope(double r, double epsilon);
/// 4 phi (1 - phi) = sech^2(3 r / eps); equals 1 on the zero level set.
double interface_weight(double r, double epsilon);
/// phi(x) for a node; throws kInvalidArgument if epsilon <= 0.
double phi(const SdfNode& node, const Point& x, double epsilon);

/// The computational domain Omega described by a root SDF together with the
/// interface width. Provides the integrand modifiers used by diffuse-domain
/// transformations.
class DomainGeometry {
 public:
  /// Takes epsilon from the root (throws kMissingEpsilon if unset).
  explicit DomainGeometry(Sdf root);
  DomainGeometry(Sdf root, double epsilon);

  const Sdf& root() const noexcept { return root_; }
  double epsilon() const noexcept { return epsilon_; }
  int dim() const noexcept { return root_->dim(); }

  double sdf(const Point& x) const { return root_->value(x); }
  Point sdf_gradient(const Point& x) const { return root_->gradient(x); }
  double chi(const Point& x) const { return geometry::chi(*root_, x); }
  double phi(const Point& x) const { return phase_field(sdf(x), epsilon_); }
  double phi_complement(const Point& x) const { return phase_field_complement(sdf(x), epsilon_); }

  /// -grad phi = 3/(2 eps) sech^2(3r/eps) grad r.
  Point scaled_normal(const Point& x) const;
  /// |grad phi|, the diffuse approximation of the surface delta.
  double surface_delta(const Point& x) const;
  /// Outward unit normal -grad phi / |grad phi|; falls back to grad r far
  /// from the interface where |grad phi| underflows.
  Point normal(const Point& x) const;

  Point boundary_projection(const Point& x) const;
  Point external_projection(const Point& x) const;

  /// Looks up a named node; throws kNotFound listing the known names.
  Sdf segment(std::string_view name) const;
  /// Interface width used for a segment's own phase field.
  double segment_epsilon(const SdfNode& segment) const;
  /// Unnormalised boundary weight w_i(P(x)) = 4 phi_i (1 - phi_i) at the
  /// closest boundary point of Omega.
  double projected_weight(const SdfNode& segment, const Point& x) const;
  double projected_weight(std::string_view name, const Point& x) const;
  /// Same weight given an already computed boundary projection of x.
  double weight_at_projection(const SdfNode& segment, const Point& projected) const;

 private:
  Sdf root_;
  double epsilon_;
};

}  // namespace ddfem::geometry
