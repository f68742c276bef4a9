#include "ddfem/geometry/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::geometry {

namespace {

double sign_nonneg(double v) { return v >= 0.0 ? 1.0 : -1.0; }

void require_positive(double value, std::string_view what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite, got " << value;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

void require_dims(const Point& p, int dim, std::string_view what) {
  if (p.size() != dim) {
    std::ostringstream msg;
    msg << what << " has dimension " << p.size() << ", expected " << dim;
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

int checked_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "unsupported SDF dimension " + std::to_string(dim));
  }
  return dim;
}

}  // namespace

// SdfNode

SdfNode::SdfNode(int dim) : dim_(checked_dim(dim)) {}

void SdfNode::check_dim(const Point& x) const {
  if (x.size() != dim_) {
    std::ostringstream msg;
    msg << kind() << " expects " << dim_ << "D points, got " << x.size() << "D";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

double SdfNode::value(const Point& x) const {
  check_dim(x);
  return do_value(x);
}

Point SdfNode::gradient(const Point& x) const {
  check_dim(x);
  return do_gradient(x);
}

Point SdfNode::do_gradient(const Point& x) const { return finite_difference_gradient(x); }

Point SdfNode::finite_difference_gradient(const Point& x) const {
  const double step = 1e-6 * (1.0 + x.norm());
  Point g(dim_);
  Point xp = x;
  for (int i = 0; i < dim_; ++i) {
    xp[i] = x[i] + step;
    const double fp = do_value(xp);
    xp[i] = x[i] - step;
    const double fm = do_value(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

bool SdfNode::has_epsilon() const noexcept {
  if (epsilon_) return true;
  for (const auto& c : children()) {
    if (c->has_epsilon()) return true;
  }
  return false;
}

double SdfNode::epsilon() const {
  if (epsilon_) return *epsilon_;
  std::optional<double> best;
  for (const auto& c : children()) {
    if (c->has_epsilon()) best = std::max(best.value_or(0.0), c->epsilon());
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no epsilon set on " << kind();
    if (name_) msg << " '" << *name_ << "'";
    msg << " or any of its children";
    throw Error(ErrorCode::kMissingEpsilon, msg.str());
  }
  return *best;
}

void SdfNode::set_epsilon(double epsilon) {
  require_positive(epsilon, "epsilon");
  epsilon_ = epsilon;
  for (const auto& c : children()) c->set_epsilon(epsilon);
}

Sdf SdfNode::search(std::string_view name) {
  if (name_ && *name_ == name) return shared_from_this();
  for (const auto& c : children()) {
    if (auto found = c->search(name)) return found;
  }
  return nullptr;
}

// Primitives

Ball::Ball(double radius, Point center)
    : SdfNode(static_cast<int>(center.size())), radius_(radius), center_(std::move(center)) {
  require_positive(radius_, "ball radius");
}

double Ball::do_value(const Point& x) const { return (x - center_).norm() - radius_; }

Point Ball::do_gradient(const Point& x) const {
  Point d = x - center_;
  const double n = d.norm();
  if (n == 0.0) {
    // Centre: every direction is a steepest ascent; take the first axis.
    Point e = Point::Zero(dim());
    e[0] = 1.0;
    return e;
  }
  return d / n;
}

Box::Box(Point center, Point half_extents)
    : SdfNode(static_cast<int>(center.size())),
      center_(std::move(center)),
      half_extents_(std::move(half_extents)) {
  require_dims(half_extents_, dim(), "box half extents");
  for (int i = 0; i < dim(); ++i) require_positive(half_extents_[i], "box half extent");
}

double Box::do_value(const Point& x) const {
  const Point q = (x - center_).cwiseAbs() - half_extents_;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

Point Box::do_gradient(const Point& x) const {
  const Point d = x - center_;
  const Point q = d.cwiseAbs() - half_extents_;
  Point g = Point::Zero(dim());
  Eigen::Index k = 0;
  const double qmax = q.maxCoeff(&k);
  if (qmax > 0.0) {
    const Point outside = q.cwiseMax(0.0);
    const double len = outside.norm();
    for (int i = 0; i < dim(); ++i) g[i] = sign_nonneg(d[i]) * outside[i] / len;
  } else {
    g[k] = sign_nonneg(d[k]);
  }
  return g;
}

HalfPlane::HalfPlane(Point normal, double offset)
    : SdfNode(static_cast<int>(normal.size())), normal_(std::move(normal)), offset_(offset) {
  const double n = normal_.norm();
  require_positive(n, "half-plane normal length");
  normal_ /= n;
}

double HalfPlane::do_value(const Point& x) const { return normal_.dot(x) - offset_; }

// Binary operators

BinaryOperator::BinaryOperator(Sdf first, Sdf second)
    : SdfNode(first ? first->dim() : 1), children_{std::move(first), std::move(second)} {
  if (!children_[0] || !children_[1]) {
    throw Error(ErrorCode::kInvalidArgument, "operator child is null");
  }
  if (children_[0]->dim() != children_[1]->dim()) {
    std::ostringstream msg;
    msg << "operands have dimensions " << children_[0]->dim() << " and "
        << children_[1]->dim();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

double Union::do_value(const Point& x) const {
  return std::min(first().value(x), second().value(x));
}

Point Union::do_gradient(const Point& x) const {
  return first().value(x) <= second().value(x) ? first().gradient(x) : second().gradient(x);
}

double Intersection::do_value(const Point& x) const {
  return std::max(first().value(x), second().value(x));
}

Point Intersection::do_gradient(const Point& x) const {
  return first().value(x) >= second().value(x) ? first().gradient(x) : second().gradient(x);
}

double Subtraction::do_value(const Point& x) const {
  return std::max(first().value(x), -second().value(x));
}

Point Subtraction::do_gradient(const Point& x) const {
  if (first().value(x) >= -second().value(x)) return first().gradient(x);
  return -second().gradient(x);
}

double Xor::do_value(const Point& x) const {
  const double a = first().value(x);
  const double b = second().value(x);
  return std::max(std::min(a, b), -std::max(a, b));
}

Point Xor::do_gradient(const Point& x) const {
  const double a = first().value(x);
  const double b = second().value(x);
  const double lower = std::min(a, b);
  const double upper_neg = -std::max(a, b);
  if (lower >= upper_neg) return a <= b ? first().gradient(x) : second().gradient(x);
  return a >= b ? Point(-first().gradient(x)) : Point(-second().gradient(x));
}

// Unary operators

UnaryOperator::UnaryOperator(Sdf child, int dim) : SdfNode(dim), child_(std::move(child)) {
  if (!child_) throw Error(ErrorCode::kInvalidArgument, "operator child is null");
}

Invert::Invert(Sdf child) : UnaryOperator(child, child ? child->dim() : 1) {}

double Invert::do_value(const Point& x) const { return -child().value(x); }
Point Invert::do_gradient(const Point& x) const { return -child().gradient(x); }

Translate::Translate(Sdf child, Point offset)
    : UnaryOperator(child, child ? child->dim() : 1), offset_(std::move(offset)) {
  require_dims(offset_, dim(), "translation offset");
}

double Translate::do_value(const Point& x) const { return child().value(x - offset_); }
Point Translate::do_gradient(const Point& x) const { return child().gradient(x - offset_); }

Rotate::Rotate(Sdf child, double angle) : UnaryOperator(child, child ? child->dim() : 1) {
  if (dim() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "angle-only rotation requires a 2D child");
  }
  rotation_.resize(2, 2);
  rotation_ << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
}

Rotate::Rotate(Sdf child, const Point& axis, double angle)
    : UnaryOperator(child, child ? child->dim() : 1) {
  if (dim() != 3) throw Error(ErrorCode::kDimensionMismatch, "axis rotation requires a 3D child");
  require_dims(axis, 3, "rotation axis");
  const double n = axis.norm();
  require_positive(n, "rotation axis length");
  const Eigen::Vector3d k = Eigen::Vector3d(axis[0], axis[1], axis[2]) / n;
  Eigen::Matrix3d cross;
  cross << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + std::sin(angle) * cross +
                            (1.0 - std::cos(angle)) * cross * cross;
  rotation_ = r;
}

double Rotate::do_value(const Point& x) const {
  return child().value(rotation_.transpose() * x);
}

Point Rotate::do_gradient(const Point& x) const {
  return rotation_ * child().gradient(rotation_.transpose() * x);
}

Scale::Scale(Sdf child, double factor)
    : UnaryOperator(child, child ? child->dim() : 1), factor_(factor) {
  require_positive(factor_, "scale factor");
}

double Scale::do_value(const Point& x) const { return factor_ * child().value(x / factor_); }
Point Scale::do_gradient(const Point& x) const { return child().gradient(x / factor_); }

Round::Round(Sdf child, double radius)
    : UnaryOperator(child, child ? child->dim() : 1), radius_(radius) {
  if (!(radius_ >= 0.0) || !std::isfinite(radius_)) {
    throw Error(ErrorCode::kInvalidArgument, "round radius must be non-negative");
  }
}

double Round::do_value(const Point& x) const { return child().value(x) - radius_; }
Point Round::do_gradient(const Point& x) const { return child().gradient(x); }

namespace {
int lifted_dim(const Sdf& child, std::string_view what) {
  if (!child) throw Error(ErrorCode::kInvalidArgument, "operator child is null");
  if (child->dim() != 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " requires a 2D profile, got " +
                    std::to_string(child->dim()) + "D");
  }
  return 3;
}
}  // namespace

Extrusion::Extrusion(Sdf child, double height)
    : UnaryOperator(child, lifted_dim(child, "extrusion")), height_(height) {
  require_positive(height_, "extrusion height");
}

double Extrusion::do_value(const Point& x) const {
  const double d = child().value(make_point({x[0], x[1]}));
  const double w = std::abs(x[2]) - 0.5 * height_;
  return std::hypot(std::max(d, 0.0), std::max(w, 0.0)) + std::min(std::max(d, w), 0.0);
}

Point Extrusion::do_gradient(const Point& x) const {
  const Point xy = make_point({x[0], x[1]});
  const double d = child().value(xy);
  const double w = std::abs(x[2]) - 0.5 * height_;
  if (x[2] == 0.0 && w >= d) return finite_difference_gradient(x);
  const Point gd = child().gradient(xy);
  const double sz = x[2] > 0.0 ? 1.0 : -1.0;
  Point g(3);
  if (std::max(d, w) > 0.0) {
    const double a = std::max(d, 0.0);
    const double b = std::max(w, 0.0);
    const double len = std::hypot(a, b);
    g << a / len * gd[0], a / len * gd[1], b / len * sz;
  } else if (d >= w) {
    g << gd[0], gd[1], 0.0;
  } else {
    g << 0.0, 0.0, sz;
  }
  return g;
}

Revolution::Revolution(Sdf child, double offset)
    : UnaryOperator(child, lifted_dim(child, "revolution")), offset_(offset) {}

double Revolution::do_value(const Point& x) const {
  return child().value(make_point({std::hypot(x[0], x[1]) - offset_, x[2]}));
}

Point Revolution::do_gradient(const Point& x) const {
  const double rho = std::hypot(x[0], x[1]);
  if (rho < 1e-12) return finite_difference_gradient(x);
  const Point gc = child().gradient(make_point({rho - offset_, x[2]}));
  return make_point({gc[0] * x[0] / rho, gc[0] * x[1] / rho, gc[1]});
}

// Helpers

namespace {
Sdf with_name(Sdf node, std::optional<std::string> name) {
  if (name) node->set_name(std::move(*name));
  return node;
}
}  // namespace

Sdf ball(double radius, Point center, std::optional<std::string> name) {
  return with_name(std::make_shared<Ball>(radius, std::move(center)), std::move(name));
}
Sdf box(Point center, Point half_extents, std::optional<std::string> name) {
  return with_name(std::make_shared<Box>(std::move(center), std::move(half_extents)),
                   std::move(name));
}
Sdf half_plane(Point normal, double offset, std::optional<std::string> name) {
  return with_name(std::make_shared<HalfPlane>(std::move(normal), offset), std::move(name));
}
Sdf translate(Sdf child, Point offset) {
  return std::make_shared<Translate>(std::move(child), std::move(offset));
}
Sdf rotate(Sdf child, double angle) { return std::make_shared<Rotate>(std::move(child), angle); }
Sdf scale(Sdf child, double factor) { return std::make_shared<Scale>(std::move(child), factor); }
Sdf round(Sdf child, double radius) { return std::make_shared<Round>(std::move(child), radius); }
Sdf extrude(Sdf child, double height) {
  return std::make_shared<Extrusion>(std::move(child), height);
}
Sdf revolve(Sdf child, double offset) {
  return std::make_shared<Revolution>(std::move(child), offset);
}

Sdf named(Sdf node, std::string name) {
  node->set_name(std::move(name));
  return node;
}

Sdf operator|(Sdf a, Sdf b) { return std::make_shared<Union>(std::move(a), std::move(b)); }
Sdf operator&(Sdf a, Sdf b) { return std::make_shared<Intersection>(std::move(a), std::move(b)); }
Sdf operator-(Sdf a, Sdf b) { return std::make_shared<Subtraction>(std::move(a), std::move(b)); }
Sdf operator^(Sdf a, Sdf b) { return std::make_shared<Xor>(std::move(a), std::move(b)); }
Sdf operator-(Sdf a) { return std::make_shared<Invert>(std::move(a)); }

namespace {
void walk_names(const SdfNode& node, std::set<const SdfNode*>& seen,
                std::vector<std::pair<std::string, const SdfNode*>>& out) {
  if (!seen.insert(&node).second) return;
  if (node.name()) out.emplace_back(*node.name(), &node);
  for (const auto& c : node.children()) walk_names(*c, seen, out);
}
}  // namespace

void check_unique_names(const SdfNode& root) {
  std::set<const SdfNode*> seen;
  std::vector<std::pair<std::string, const SdfNode*>> names;
  walk_names(root, seen, names);
  std::set<std::string> unique;
  for (const auto& [name, node] : names) {
    if (!unique.insert(name).second) {
      throw Error(ErrorCode::kDuplicate, "SDF name '" + name + "' is used by more than one node");
    }
  }
}

std::vector<std::string> collect_names(const SdfNode& root) {
  std::set<const SdfNode*> seen;
  std::vector<std::pair<std::string, const SdfNode*>> names;
  walk_names(root, seen, names);
  std::vector<std::string> out;
  for (auto& [name, node] : names) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

double chi(const SdfNode& node, const Point& x) { return node.value(x) <= 0.0 ? 1.0 : 0.0; }

Point projection(const SdfNode& node, const Point& x) {
  return -node.value(x) * node.gradient(x);
}

Point boundary_projection(const SdfNode& node, const Point& x) {
  return x + projection(node, x);
}

Point external_projection(const SdfNode& node, const Point& x) {
  const double r = node.value(x);
  if (r <= 0.0) return x;
  return x - r * node.gradient(x);
}

}  // namespace ddfem::geometry
