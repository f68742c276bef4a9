#include "ddfem/fem/norms.hpp"

#include <cmath>

#include "ddfem/error.hpp"

namespace ddfem::fem {

ScalarFunction weight_function(const geometry::DomainGeometry* domain, Weight weight) {
  if (weight == Weight::kOne) return [](const Point&) { return 1.0; };
  if (!domain) throw Error(ErrorCode::kInvalidArgument, "chi and phi weights need a domain");
  if (weight == Weight::kChi) return [domain](const Point& x) { return domain->chi(x); };
  return [domain](const Point& x) { return domain->phi(x); };
}

void for_each_quadrature_point(
    const StructuredMesh& mesh, int refine,
    const std::function<void(int, const std::array<double, 3>&, const Point&, double)>& f) {
  if (refine < 1) throw Error(ErrorCode::kInvalidArgument, "refinement must be at least 1");
  const double k = refine;
  constexpr std::array<std::array<double, 3>, 3> rule{{
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
  }};
  for (int c : mesh.active_cells()) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const double w = geo.area / (k * k) / 3.0;
    // Sub-triangle corners on the barycentric lattice (i, j) / refine.
    auto emit = [&](std::array<std::array<double, 2>, 3> corners) {
      for (const auto& q : rule) {
        const double s = q[0] * corners[0][0] + q[1] * corners[1][0] + q[2] * corners[2][0];
        const double t = q[0] * corners[0][1] + q[1] * corners[1][1] + q[2] * corners[2][1];
        const std::array<double, 3> lambda{1.0 - s - t, s, t};
        const Point x = lambda[0] * geo.vertices[0] + lambda[1] * geo.vertices[1] +
                        lambda[2] * geo.vertices[2];
        f(c, lambda, x, w);
      }
    };
    for (int i = 0; i < refine; ++i) {
      for (int j = 0; i + j < refine; ++j) {
        emit({{{i / k, j / k}, {(i + 1) / k, j / k}, {i / k, (j + 1) / k}}});
        if (i + j + 1 < refine) {
          emit({{{(i + 1) / k, j / k}, {(i + 1) / k, (j + 1) / k}, {i / k, (j + 1) / k}}});
        }
      }
    }
  }
}

double error_norm_L2(const DiscreteField& U, const PointFunction& exact,
                     const ScalarFunction& weight, int refine) {
  double sum = 0.0;
  for_each_quadrature_point(*U.mesh(), refine,
                            [&](int cell, const std::array<double, 3>& l, const Point& x, double w) {
                              const double wt = weight(x);
                              if (wt == 0.0) return;
                              const State diff = U.evaluate(cell, l) - exact(x);
                              sum += w * wt * diff.squaredNorm();
                            });
  return std::sqrt(sum);
}

double error_norm_L2(const DiscreteField& U, const PointFunction& exact,
                     const geometry::DomainGeometry& domain, Weight weight, int refine) {
  return error_norm_L2(U, exact, weight_function(&domain, weight), refine);
}

double integrate(const DiscreteField& U, int component, const ScalarFunction& weight,
                 int refine) {
  if (component < 0 || component >= U.components()) {
    throw Error(ErrorCode::kInvalidArgument, "component out of range");
  }
  double sum = 0.0;
  for_each_quadrature_point(*U.mesh(), refine,
                            [&](int cell, const std::array<double, 3>& l, const Point& x, double w) {
                              sum += w * weight(x) * U.evaluate(cell, l)[component];
                            });
  return sum;
}

double weighted_energy(const DiscreteField& U, const ScalarFunction& weight, int refine) {
  double sum = 0.0;
  int last = -1;
  Flux grad;
  for_each_quadrature_point(*U.mesh(), refine,
                            [&](int cell, const std::array<double, 3>&, const Point& x, double w) {
                              if (cell != last) {
                                grad = U.gradient(cell);
                                last = cell;
                              }
                              sum += w * weight(x) * grad.squaredNorm();
                            });
  return sum;
}

}  // namespace ddfem::fem
