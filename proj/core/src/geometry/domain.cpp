#include "ddfem/geometry/domain.hpp"

#include <cmath>
#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::geometry {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream msg;
    msg << "epsilon must be positive, got " << epsilon;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

// sech^2(a) = 4 e^{-2|a|} / (1 + e^{-2|a|})^2
double sech_squared(double a) {
  const double e = std::exp(-2.0 * std::abs(a));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

// (1 - tanh a) / 2 = 1 / (1 + e^{2a}) keeps full relative precision in the
// exterior tail instead of rounding to zero once tanh a rounds to 1.
double phase_field(double r, double epsilon) {
  return 1.0 / (1.0 + std::exp(6.0 * r / epsilon));
}

double phase_field_complement(double r, double epsilon) {
  return 1.0 / (1.0 + std::exp(-6.0 * r / epsilon));
}

double phase_field_slope(double r, double epsilon) {
  return 1.5 / epsilon * sech_squared(3.0 * r / epsilon);
}

double interface_weight(double r, double epsilon) { return sech_squared(3.0 * r / epsilon); }

double phi(const SdfNode& node, const Point& x, double epsilon) {
  require_epsilon(epsilon);
  return phase_field(node.value(x), epsilon);
}

DomainGeometry::DomainGeometry(Sdf root) : root_(std::move(root)) {
  if (!root_) throw Error(ErrorCode::kInvalidArgument, "domain root is null");
  epsilon_ = root_->epsilon();
  require_epsilon(epsilon_);
  check_unique_names(*root_);
}

DomainGeometry::DomainGeometry(Sdf root, double epsilon)
    : root_(std::move(root)), epsilon_(epsilon) {
  if (!root_) throw Error(ErrorCode::kInvalidArgument, "domain root is null");
  require_epsilon(epsilon_);
  check_unique_names(*root_);
}

Point DomainGeometry::scaled_normal(const Point& x) const {
  return phase_field_slope(sdf(x), epsilon_) * sdf_gradient(x);
}

double DomainGeometry::surface_delta(const Point& x) const {
  return phase_field_slope(sdf(x), epsilon_) * sdf_gradient(x).norm();
}

Point DomainGeometry::normal(const Point& x) const {
  const Point g = scaled_normal(x);
  const double n = g.norm();
  if (n < 1e-300) return sdf_gradient(x);
  return g / n;
}

Point DomainGeometry::boundary_projection(const Point& x) const {
  return geometry::boundary_projection(*root_, x);
}

Point DomainGeometry::external_projection(const Point& x) const {
  return geometry::external_projection(*root_, x);
}

Sdf DomainGeometry::segment(std::string_view name) const {
  if (auto node = root_->search(name)) return node;
  std::ostringstream msg;
  msg << "no SDF named '" << name << "' in the domain tree; known names:";
  const auto names = collect_names(*root_);
  if (names.empty()) msg << " (none)";
  for (const auto& n : names) msg << " '" << n << "'";
  throw Error(ErrorCode::kNotFound, msg.str());
}

double DomainGeometry::segment_epsilon(const SdfNode& segment) const {
  return segment.has_epsilon() ? segment.epsilon() : epsilon_;
}

double DomainGeometry::weight_at_projection(const SdfNode& segment,
                                            const Point& projected) const {
  return interface_weight(segment.value(projected), segment_epsilon(segment));
}

double DomainGeometry::projected_weight(const SdfNode& segment, const Point& x) const {
  return weight_at_projection(segment, boundary_projection(x));
}

double DomainGeometry::projected_weight(std::string_view name, const Point& x) const {
  return projected_weight(*segment(name), x);
}

}  // namespace ddfem::geometry
