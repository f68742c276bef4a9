#include "ddfem/boundary/conditions.hpp"

#include <algorithm>

namespace ddfem::boundary {

bool BoundaryMap::has_diffuse() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const BoundaryEntry& e) { return is_diffuse(e.key); });
}

bool BoundaryMap::has_diffuse_dirichlet() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const BoundaryEntry& e) {
    return is_diffuse(e.key) && is_dirichlet(e.condition);
  });
}

BoundaryMap BoundaryMap::mesh_only() const {
  BoundaryMap out;
  for (const auto& e : entries_) {
    if (!is_diffuse(e.key)) out.add(e.key, e.condition);
  }
  return out;
}

MeshPredicate whole_mesh_boundary() {
  return [](const Point&) { return true; };
}

}  // namespace ddfem::boundary
