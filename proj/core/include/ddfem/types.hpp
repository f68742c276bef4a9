#pragma once

#include <Eigen/Core>

#include <initializer_list>

namespace ddfem {

/// Upper bound on spatial dimension (2D solver, 3D geometry).
inline constexpr int kMaxDim = 3;
/// Upper bound on the number of solution components of a PDE system.
inline constexpr int kMaxComponents = 4;

// Dynamic-size vectors with a fixed maximum so that pointwise evaluation
// never touches the heap.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxComponents, 1>;
/// m x d matrix: fluxes F_c, F_v and state gradients DU.
using Flux = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxComponents,
                           kMaxDim>;

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

inline State make_state(std::initializer_list<double> values) {
  State s(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) s[i++] = v;
  return s;
}

inline State zero_state(int components) { return State::Zero(components); }
inline Flux zero_flux(int components, int dim) { return Flux::Zero(components, dim); }

}  // namespace ddfem
