#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library beyond its value types.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "ddfem/geometry/sdf.hpp"
#include "ddfem/types.hpp"

namespace ddfem::testing {

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

/// First `count` points of the 2D Halton sequence (bases 2, 3) scaled to
/// [lo, hi]^2.
inline std::vector<Point> halton_2d(int count, double lo, double hi) {
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    const auto i = static_cast<std::uint64_t>(k);
    points.push_back(make_point({lo + (hi - lo) * radical_inverse(i, 2),
                                 lo + (hi - lo) * radical_inverse(i, 3)}));
  }
  return points;
}

/// Central finite-difference gradient of a scalar function.
inline Point fd_gradient(const std::function<double(const Point&)>& f, const Point& x,
                         double h = 1e-6) {
  Point g(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    Point a = x;
    Point b = x;
    a[d] += h;
    b[d] -= h;
    g[d] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Boolean CSG tree over discs, evaluated by point membership only.
struct MembershipTree {
  enum class Op { kBall, kUnion, kIntersection, kSubtraction, kXor };
  Op op = Op::kBall;
  double radius = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  std::shared_ptr<MembershipTree> a;
  std::shared_ptr<MembershipTree> b;

  bool inside(const Point& x) const {
    switch (op) {
      case Op::kBall:
        return std::hypot(x[0] - cx, x[1] - cy) <= radius;
      case Op::kUnion:
        return a->inside(x) || b->inside(x);
      case Op::kIntersection:
        return a->inside(x) && b->inside(x);
      case Op::kSubtraction:
        return a->inside(x) && !b->inside(x);
      case Op::kXor:
        return a->inside(x) != b->inside(x);
    }
    return false;
  }

  /// Distance from x to the nearest circle of any leaf; zero sets of the
  /// composed tree lie on these circles.
  double distance_to_circles(const Point& x) const {
    if (op == Op::kBall) return std::abs(std::hypot(x[0] - cx, x[1] - cy) - radius);
    return std::min(a->distance_to_circles(x), b->distance_to_circles(x));
  }

  geometry::Sdf to_sdf() const {
    using namespace geometry;
    switch (op) {
      case Op::kBall:
        return ball(radius, make_point({cx, cy}));
      case Op::kUnion:
        return a->to_sdf() | b->to_sdf();
      case Op::kIntersection:
        return a->to_sdf() & b->to_sdf();
      case Op::kSubtraction:
        return a->to_sdf() - b->to_sdf();
      case Op::kXor:
        return a->to_sdf() ^ b->to_sdf();
    }
    return nullptr;
  }
};

/// Random tree over `balls` discs inside [-1.5, 1.5]^2.
inline std::shared_ptr<MembershipTree> random_tree(std::mt19937_64& rng, int balls) {
  std::uniform_real_distribution<double> centre(-1.0, 1.0);
  std::uniform_real_distribution<double> radius(0.2, 1.0);
  std::uniform_int_distribution<int> op(1, 4);
  std::vector<std::shared_ptr<MembershipTree>> nodes;
  for (int k = 0; k < balls; ++k) {
    auto leaf = std::make_shared<MembershipTree>();
    leaf->radius = radius(rng);
    leaf->cx = centre(rng);
    leaf->cy = centre(rng);
    nodes.push_back(leaf);
  }
  auto root = nodes[0];
  for (int k = 1; k < balls; ++k) {
    auto parent = std::make_shared<MembershipTree>();
    parent->op = static_cast<MembershipTree::Op>(op(rng));
    parent->a = root;
    parent->b = nodes[static_cast<std::size_t>(k)];
    root = parent;
  }
  return root;
}

/// 0.5 (1 - tanh(3 r / eps)) straight from the definition.
inline double reference_phi(double r, double eps) { return 0.5 * (1.0 - std::tanh(3.0 * r / eps)); }

}  // namespace ddfem::testing
