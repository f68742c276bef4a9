#pragma once

#include <functional>

#include "ddfem/fem/field.hpp"
#include "ddfem/geometry/domain.hpp"

namespace ddfem::fem {

enum class Weight { kOne, kChi, kPhi };

using PointFunction = std::function<State(const Point&)>;
using ScalarFunction = std::function<double(const Point&)>;

/// Pointwise weight function of a domain: 1, chi or phi.
ScalarFunction weight_function(const geometry::DomainGeometry* domain, Weight weight);

/// sqrt(sum_cells int weight |U - exact|^2). Each cell is split into
/// refine^2 similar sub-triangles with the 3-point rule on each, which
/// resolves the jump of chi inside a cell.
double error_norm_L2(const DiscreteField& U, const PointFunction& exact,
                     const ScalarFunction& weight, int refine = 4);
double error_norm_L2(const DiscreteField& U, const PointFunction& exact,
                     const geometry::DomainGeometry& domain, Weight weight, int refine = 4);

/// int weight * U_c over the active cells.
double integrate(const DiscreteField& U, int component, const ScalarFunction& weight,
                 int refine = 4);
/// int weight |grad U|^2 over the active cells.
double weighted_energy(const DiscreteField& U, const ScalarFunction& weight, int refine = 4);

/// Calls f(cell, lambda, x, w) at every sub-cell quadrature point.
void for_each_quadrature_point(
    const StructuredMesh& mesh, int refine,
    const std::function<void(int cell, const std::array<double, 3>& lambda, const Point& x,
                             double w)>& f);

}  // namespace ddfem::fem
