#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ddfem/geometry/sdf.hpp"
#include "ddfem/types.hpp"

namespace ddfem::boundary {

using ValueFn = std::function<State(double t, const Point& x)>;
using FluxCFn = std::function<State(double t, const Point& x, const State& U, const Point& n)>;
using FluxVFn = std::function<State(double t, const Point& x, const State& U, const Flux& DU,
                                    const Point& n)>;

/// u = g.
struct DirichletValue {
  ValueFn g;
};
/// Convective flux data g_c, matched against F_c . n.
struct FluxC {
  FluxCFn g_c;
};
/// Viscous flux data g_v, matched against F_v . n.
struct FluxV {
  FluxVFn g_v;
};
/// (F_c - F_v) . n = g_c - g_v for models with both fluxes.
struct FluxPair {
  FluxC convective;
  FluxV viscous;
};

using BoundaryCondition = std::variant<DirichletValue, FluxC, FluxV, FluxPair>;

inline bool is_dirichlet(const BoundaryCondition& bc) {
  return std::holds_alternative<DirichletValue>(bc);
}

/// Selects facets of the computational (box) mesh by position.
using MeshPredicate = std::function<bool(const Point& x)>;

/// A key naming either a diffuse boundary segment (an SDF node or its name)
/// or a part of the computational mesh boundary.
using BoundaryKey = std::variant<geometry::Sdf, std::string, MeshPredicate>;

inline bool is_diffuse(const BoundaryKey& key) {
  return !std::holds_alternative<MeshPredicate>(key);
}

struct BoundaryEntry {
  BoundaryKey key;
  BoundaryCondition condition;
};

/// Ordered list of boundary conditions. Mesh-predicate entries are matched
/// first-come, first-served.
class BoundaryMap {
 public:
  BoundaryMap() = default;

  BoundaryMap& add(BoundaryKey key, BoundaryCondition condition) {
    entries_.push_back({std::move(key), std::move(condition)});
    return *this;
  }

  const std::vector<BoundaryEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  bool has_diffuse() const;
  bool has_diffuse_dirichlet() const;
  /// Copy holding only the mesh-predicate entries.
  BoundaryMap mesh_only() const;

 private:
  std::vector<BoundaryEntry> entries_;
};

/// Predicate that selects every mesh boundary facet.
MeshPredicate whole_mesh_boundary();

}  // namespace ddfem::boundary
