#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddfem/types.hpp"

namespace ddfem::geometry {

class SdfNode;
using Sdf = std::shared_ptr<SdfNode>;

/// Node of a constructive-solid-geometry tree of signed distance functions.
///
/// The value is negative inside the shape and positive outside. Children are
/// fixed at construction, so trees are acyclic; epsilon and name may be set
/// while the tree is being built and must not change once it is in use.
/// Evaluation is const and thread safe.
class SdfNode : public std::enable_shared_from_this<SdfNode> {
 public:
  virtual ~SdfNode() = default;
  SdfNode(const SdfNode&) = delete;
  SdfNode& operator=(const SdfNode&) = delete;

  /// Spatial dimension of the points this node accepts.
  int dim() const noexcept { return dim_; }
  virtual std::string_view kind() const = 0;
  virtual std::span<const Sdf> children() const { return {}; }

  /// Signed distance at x; throws kDimensionMismatch on wrong point size.
  double value(const Point& x) const;
  /// Gradient of the signed distance. At min/max ties the first operand wins.
  Point gradient(const Point& x) const;

  /// Own epsilon if set, else the maximum over the subtree; throws
  /// kMissingEpsilon when no node in the subtree carries one.
  double epsilon() const;
  bool has_epsilon() const noexcept;
  std::optional<double> own_epsilon() const noexcept { return epsilon_; }
  /// Assigns epsilon to this node and every descendant.
  void set_epsilon(double epsilon);

  const std::optional<std::string>& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Depth-first (pre-order) search by name; nullptr when absent.
  Sdf search(std::string_view name);

 protected:
  explicit SdfNode(int dim);

  virtual double do_value(const Point& x) const = 0;
  /// Defaults to central finite differences.
  virtual Point do_gradient(const Point& x) const;
  Point finite_difference_gradient(const Point& x) const;

 private:
  void check_dim(const Point& x) const;

  int dim_;
  std::optional<double> epsilon_;
  std::optional<std::string> name_;
};

// Primitives.

class Ball final : public SdfNode {
 public:
  Ball(double radius, Point center);
  std::string_view kind() const override { return "ball"; }
  double radius() const { return radius_; }
  const Point& center() const { return center_; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  double radius_;
  Point center_;
};

/// Axis-aligned box given by its center and half extents.
class Box final : public SdfNode {
 public:
  Box(Point center, Point half_extents);
  std::string_view kind() const override { return "box"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  Point center_;
  Point half_extents_;
};

/// {x : n.x <= offset}; the normal is normalised on construction.
class HalfPlane final : public SdfNode {
 public:
  HalfPlane(Point normal, double offset);
  std::string_view kind() const override { return "halfplane"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point&) const override { return normal_; }

 private:
  Point normal_;
  double offset_;
};

// Operators.

class BinaryOperator : public SdfNode {
 public:
  std::span<const Sdf> children() const override { return children_; }

 protected:
  BinaryOperator(Sdf first, Sdf second);
  const SdfNode& first() const { return *children_[0]; }
  const SdfNode& second() const { return *children_[1]; }

 private:
  std::vector<Sdf> children_;
};

class Union final : public BinaryOperator {
 public:
  Union(Sdf a, Sdf b) : BinaryOperator(std::move(a), std::move(b)) {}
  std::string_view kind() const override { return "union"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;
};

class Intersection final : public BinaryOperator {
 public:
  Intersection(Sdf a, Sdf b) : BinaryOperator(std::move(a), std::move(b)) {}
  std::string_view kind() const override { return "intersection"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;
};

/// a minus b: max(a, -b).
class Subtraction final : public BinaryOperator {
 public:
  Subtraction(Sdf a, Sdf b) : BinaryOperator(std::move(a), std::move(b)) {}
  std::string_view kind() const override { return "subtraction"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;
};

class Xor final : public BinaryOperator {
 public:
  Xor(Sdf a, Sdf b) : BinaryOperator(std::move(a), std::move(b)) {}
  std::string_view kind() const override { return "xor"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;
};

class UnaryOperator : public SdfNode {
 public:
  std::span<const Sdf> children() const override { return {&child_, 1}; }

 protected:
  UnaryOperator(Sdf child, int dim);
  const SdfNode& child() const { return *child_; }

 private:
  Sdf child_;
};

class Invert final : public UnaryOperator {
 public:
  explicit Invert(Sdf child);
  std::string_view kind() const override { return "invert"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;
};

class Translate final : public UnaryOperator {
 public:
  Translate(Sdf child, Point offset);
  std::string_view kind() const override { return "translate"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  Point offset_;
};

/// Rotation about the origin. The child is evaluated at R^T x.
class Rotate final : public UnaryOperator {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim,
                               kMaxDim>;

  /// 2D rotation by `angle` radians (counter-clockwise).
  Rotate(Sdf child, double angle);
  /// 3D rotation by `angle` radians about `axis` (right-hand rule).
  Rotate(Sdf child, const Point& axis, double angle);
  std::string_view kind() const override { return "rotate"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  Matrix rotation_;
};

/// Uniform scaling s * child(x / s), s > 0.
class Scale final : public UnaryOperator {
 public:
  Scale(Sdf child, double factor);
  std::string_view kind() const override { return "scale"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  double factor_;
};

/// Offsets the zero level set outward by `radius`.
class Round final : public UnaryOperator {
 public:
  Round(Sdf child, double radius);
  std::string_view kind() const override { return "round"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  double radius_;
};

/// Extrudes a 2D profile along z over total height h centred at z = 0.
class Extrusion final : public UnaryOperator {
 public:
  Extrusion(Sdf child, double height);
  std::string_view kind() const override { return "extrusion"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  double height_;
};

/// Revolves a 2D profile (rho, z) about the z axis; the profile is evaluated
/// at (|x_xy| - offset, x_z).
class Revolution final : public UnaryOperator {
 public:
  explicit Revolution(Sdf child, double offset = 0.0);
  std::string_view kind() const override { return "revolution"; }

 protected:
  double do_value(const Point& x) const override;
  Point do_gradient(const Point& x) const override;

 private:
  double offset_;
};

// Construction helpers.

Sdf ball(double radius, Point center, std::optional<std::string> name = std::nullopt);
Sdf box(Point center, Point half_extents, std::optional<std::string> name = std::nullopt);
Sdf half_plane(Point normal, double offset, std::optional<std::string> name = std::nullopt);
Sdf translate(Sdf child, Point offset);
Sdf rotate(Sdf child, double angle);
Sdf scale(Sdf child, double factor);
Sdf round(Sdf child, double radius);
Sdf extrude(Sdf child, double height);
Sdf revolve(Sdf child, double offset = 0.0);

/// Returns `node` after naming it, for inline tree construction.
Sdf named(Sdf node, std::string name);

Sdf operator|(Sdf a, Sdf b);  // union
Sdf operator&(Sdf a, Sdf b);  // intersection
Sdf operator-(Sdf a, Sdf b);  // subtraction
Sdf operator^(Sdf a, Sdf b);  // xor
Sdf operator-(Sdf a);         // invert

/// Throws kDuplicate if two distinct nodes of the tree share a name.
void check_unique_names(const SdfNode& root);
/// All names in the tree, pre-order, deduplicated.
std::vector<std::string> collect_names(const SdfNode& root);

// Free-function forms of the core SDF operations.

inline double sdf_eval(const SdfNode& node, const Point& x) { return node.value(x); }
inline Point grad_sdf(const SdfNode& node, const Point& x) { return node.gradient(x); }
/// 1 if x is inside or on the boundary, else 0.
double chi(const SdfNode& node, const Point& x);
/// -r(x) grad r(x).
Point projection(const SdfNode& node, const Point& x);
/// Closest point on the zero level set, x - r grad r.
Point boundary_projection(const SdfNode& node, const Point& x);
/// Identity inside, boundary projection outside.
Point external_projection(const SdfNode& node, const Point& x);
inline Sdf search(const Sdf& node, std::string_view name) { return node->search(name); }
inline void set_epsilon(SdfNode& node, double epsilon) { node.set_epsilon(epsilon); }

}  // namespace ddfem::geometry
