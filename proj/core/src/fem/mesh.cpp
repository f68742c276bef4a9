#include "ddfem/fem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::fem {

namespace {

struct EdgeRecord {
  int a;
  int b;
  int cell;
  int local;  // edge k of cell, between local vertices k and k + 1
};

// Every edge of the active cells with its owner, sorted so that shared
// edges are adjacent.
std::vector<EdgeRecord> active_edges(const StructuredMesh& mesh) {
  std::vector<EdgeRecord> edges;
  edges.reserve(mesh.active_cells().size() * 3);
  for (int c : mesh.active_cells()) {
    const auto v = mesh.cell(c);
    for (int k = 0; k < 3; ++k) {
      const int p = v[static_cast<std::size_t>(k)];
      const int q = v[static_cast<std::size_t>((k + 1) % 3)];
      edges.push_back({std::min(p, q), std::max(p, q), c, k});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeRecord& l, const EdgeRecord& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    return l.cell < r.cell;
  });
  return edges;
}

}  // namespace

StructuredMesh::StructuredMesh(Point lower, Point upper, int nx, int ny)
    : lower_(std::move(lower)), upper_(std::move(upper)), nx_(nx), ny_(ny) {
  if (lower_.size() != 2 || upper_.size() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "structured meshes are two dimensional");
  }
  for (int d = 0; d < 2; ++d) {
    if (!(lower_[d] < upper_[d]) || !std::isfinite(lower_[d]) || !std::isfinite(upper_[d])) {
      std::ostringstream msg;
      msg << "degenerate mesh bounds on axis " << d << ": [" << lower_[d] << ", " << upper_[d]
          << "]";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
  if (nx < 2 || ny < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a mesh needs at least 2 cells per axis, got " +
                                                 std::to_string(nx) + " x " + std::to_string(ny));
  }
  hx_ = (upper_[0] - lower_[0]) / nx_;
  hy_ = (upper_[1] - lower_[1]) / ny_;
  active_.assign(static_cast<std::size_t>(num_cells()), 1);
  rebuild();
}

double StructuredMesh::h() const noexcept { return std::max(hx_, hy_); }

Point StructuredMesh::vertex(int v) const {
  const int i = v % (nx_ + 1);
  const int j = v / (nx_ + 1);
  // Exact end points regardless of rounding in h.
  const double x = i == nx_ ? upper_[0] : lower_[0] + i * hx_;
  const double y = j == ny_ ? upper_[1] : lower_[1] + j * hy_;
  return make_point({x, y});
}

std::array<int, 3> StructuredMesh::cell(int c) const {
  const int quad = c / 2;
  const int i = quad % nx_;
  const int j = quad / nx_;
  const int v00 = j * (nx_ + 1) + i;
  const int v10 = v00 + 1;
  const int v01 = v00 + nx_ + 1;
  const int v11 = v01 + 1;
  if (c % 2 == 0) return {v00, v10, v11};
  return {v00, v11, v01};
}

void StructuredMesh::rebuild() {
  active_cells_.clear();
  for (int c = 0; c < num_cells(); ++c) {
    if (active_[static_cast<std::size_t>(c)]) active_cells_.push_back(c);
  }
  std::vector<std::uint8_t> used(static_cast<std::size_t>(num_vertices()), 0);
  for (int c : active_cells_) {
    for (int v : cell(c)) used[static_cast<std::size_t>(v)] = 1;
  }
  active_index_.assign(used.size(), -1);
  active_vertices_.clear();
  for (int v = 0; v < num_vertices(); ++v) {
    if (!used[static_cast<std::size_t>(v)]) continue;
    active_index_[static_cast<std::size_t>(v)] = static_cast<int>(active_vertices_.size());
    active_vertices_.push_back(v);
  }

  facets_.clear();
  const auto edges = active_edges(*this);
  for (std::size_t k = 0; k < edges.size();) {
    std::size_t end = k + 1;
    while (end < edges.size() && edges[end].a == edges[k].a && edges[end].b == edges[k].b) ++end;
    if (end - k == 1) {
      const auto v = cell(edges[k].cell);
      const auto l = static_cast<std::size_t>(edges[k].local);
      facets_.push_back({v[l], v[(l + 1) % 3], edges[k].cell});
    }
    k = end;
  }
}

int StructuredMesh::active_components() const {
  if (active_cells_.empty()) return 0;
  const auto edges = active_edges(*this);
  std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(num_cells()));
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (edges[k].a == edges[k + 1].a && edges[k].b == edges[k + 1].b) {
      neighbours[static_cast<std::size_t>(edges[k].cell)].push_back(edges[k + 1].cell);
      neighbours[static_cast<std::size_t>(edges[k + 1].cell)].push_back(edges[k].cell);
    }
  }
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_cells()), 0);
  int components = 0;
  for (int start : active_cells_) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    ++components;
    std::queue<int> queue;
    queue.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop();
      for (int n : neighbours[static_cast<std::size_t>(c)]) {
        if (!seen[static_cast<std::size_t>(n)]) {
          seen[static_cast<std::size_t>(n)] = 1;
          queue.push(n);
        }
      }
    }
  }
  return components;
}

StructuredMesh StructuredMesh::with_active(std::vector<std::uint8_t> mask) const {
  if (mask.size() != active_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cell mask has the wrong length");
  }
  StructuredMesh out = *this;
  for (std::size_t c = 0; c < mask.size(); ++c) out.active_[c] = (active_[c] && mask[c]) ? 1 : 0;
  out.rebuild();
  return out;
}

MeshPtr build_mesh(const Point& lower, const Point& upper, int nx, int ny) {
  return std::make_shared<const StructuredMesh>(lower, upper, nx, ny);
}

MeshPtr build_mesh(const Point& lower, const Point& upper, int n) {
  return build_mesh(lower, upper, n, n);
}

MeshPtr filter_cells(const StructuredMesh& mesh, const geometry::SdfNode& sdf, double threshold) {
  if (sdf.dim() != 2) throw Error(ErrorCode::kDimensionMismatch, "filter needs a 2D SDF");
  std::vector<double> r(static_cast<std::size_t>(mesh.num_vertices()));
  for (int v = 0; v < mesh.num_vertices(); ++v) r[static_cast<std::size_t>(v)] = sdf.value(mesh.vertex(v));
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(mesh.num_cells()), 1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    bool all_outside = true;
    for (int v : mesh.cell(c)) all_outside = all_outside && r[static_cast<std::size_t>(v)] > threshold;
    if (all_outside) mask[static_cast<std::size_t>(c)] = 0;
  }
  auto out = std::make_shared<const StructuredMesh>(mesh.with_active(std::move(mask)));
  if (out->num_active_cells() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "filtering removed every cell of the mesh");
  }
  const int parts = out->active_components();
  if (parts != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "filtered mesh splits into " + std::to_string(parts) +
                    " disconnected parts; enlarge the threshold or refine the mesh");
  }
  return out;
}

MeshPtr filter_cells(const StructuredMesh& mesh, const geometry::SdfNode& sdf) {
  return filter_cells(mesh, sdf, 10.0 * sdf.epsilon());
}

}  // namespace ddfem::fem
