#include "ddfem/fem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "ddfem/error.hpp"

namespace ddfem::fem {

namespace {

constexpr std::array<std::array<double, 3>, 3> kVolumePoints{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};

Point barycentric_point(const std::array<Point, 3>& v, const std::array<double, 3>& l) {
  return l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
}

[[noreturn]] void non_finite(const char* what, const Point& x) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite " << what << " at x = (";
  for (Eigen::Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
  msg << ")";
  throw Error(ErrorCode::kNonFinite, msg.str());
}

std::size_t first_match(const std::vector<model::MeshBoundaryCondition>& conditions,
                        const Point& x) {
  for (std::size_t k = 0; k < conditions.size(); ++k) {
    if (conditions[k].region(x)) return k;
  }
  return conditions.size();
}

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("DDFEM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Assembler::Assembler(model::WeakFormResidual form, MeshPtr mesh, AssemblyOptions options)
    : form_(std::move(form)), mesh_(std::move(mesh)), options_(options), m_(form_.components()) {
  if (!mesh_) throw Error(ErrorCode::kInvalidArgument, "assembly needs a mesh");
  if (form_.dim() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "the finite element solver is two dimensional; form is " +
                                                   std::to_string(form_.dim()) + "D");
  }
  if (!(options_.fd_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "fd_step must be positive");
  threads_ = options_.threads > 0 ? options_.threads : default_thread_count();

  const auto& conditions = form_.mesh_conditions();
  std::vector<std::vector<std::size_t>> facets_of(static_cast<std::size_t>(mesh_->num_cells()));
  std::vector<std::size_t> vertex_condition(static_cast<std::size_t>(mesh_->num_active_vertices()),
                                            conditions.size());
  std::vector<std::pair<std::size_t, std::size_t>> flux_facets;  // (facet, condition)
  const auto& facets = mesh_->boundary_facets();
  for (std::size_t f = 0; f < facets.size(); ++f) {
    const Point mid = 0.5 * (mesh_->vertex(facets[f].v0) + mesh_->vertex(facets[f].v1));
    const std::size_t k = first_match(conditions, mid);
    if (k == conditions.size()) continue;
    if (boundary::is_dirichlet(conditions[k].condition)) {
      for (int v : {facets[f].v0, facets[f].v1}) {
        auto& slot = vertex_condition[static_cast<std::size_t>(mesh_->active_index(v))];
        slot = std::min(slot, k);
      }
    } else {
      facets_of[static_cast<std::size_t>(facets[f].cell)].push_back(flux_facets.size());
      flux_facets.emplace_back(f, k);
    }
  }
  is_constrained_.assign(static_cast<std::size_t>(num_dofs()), 0);
  for (std::size_t a = 0; a < vertex_condition.size(); ++a) {
    if (vertex_condition[a] == conditions.size()) continue;
    for (int c = 0; c < m_; ++c) {
      const int dof = static_cast<int>(a) * m_ + c;
      constrained_.push_back(dof);
      constrained_condition_.push_back(vertex_condition[a]);
      is_constrained_[static_cast<std::size_t>(dof)] = 1;
    }
  }

  const double gauss = 0.5 / std::sqrt(3.0);
  cells_.reserve(mesh_->active_cells().size());
  for (int c : mesh_->active_cells()) {
    const CellGeometry geo = cell_geometry(*mesh_, c);
    const auto v = mesh_->cell(c);
    CellData cell;
    cell.id = c;
    for (std::size_t k = 0; k < 3; ++k) {
      cell.vertices[k] = mesh_->active_index(v[k]);
      cell.gradients[k] = geo.basis_gradients[k];
      cell.points[k] = barycentric_point(geo.vertices, kVolumePoints[k]);
    }
    cell.weight = geo.area / 3.0;
    for (std::size_t idx : facets_of[static_cast<std::size_t>(c)]) {
      const auto& facet = facets[flux_facets[idx].first];
      std::size_t l0 = 0;
      while (v[l0] != facet.v0) ++l0;
      const std::size_t l1 = (l0 + 1) % 3;
      FacetTerm term;
      term.condition = flux_facets[idx].second;
      const Point a = mesh_->vertex(facet.v0);
      const Point b = mesh_->vertex(facet.v1);
      const Point e = b - a;
      const double length = e.norm();
      term.normal = make_point({e[1] / length, -e[0] / length});
      term.weight = 0.5 * length;
      for (std::size_t g = 0; g < 2; ++g) {
        const double s = g == 0 ? 0.5 - gauss : 0.5 + gauss;
        term.points[g] = (1.0 - s) * a + s * b;
        term.lambdas[g] = {0.0, 0.0, 0.0};
        term.lambdas[g][l0] = 1.0 - s;
        term.lambdas[g][l1] = s;
      }
      cell.facets.push_back(std::move(term));
    }
    cells_.push_back(std::move(cell));
  }

  // Sparsity: every pair of active vertices sharing a cell, m x m blocks.
  std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(mesh_->num_active_vertices()));
  for (const auto& cell : cells_) {
    for (int a : cell.vertices) {
      for (int b : cell.vertices) neighbours[static_cast<std::size_t>(a)].push_back(b);
    }
  }
  std::vector<int> row_ptr{0};
  std::vector<int> cols;
  for (auto& list : neighbours) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (int c = 0; c < m_; ++c) {
      for (int b : list) {
        for (int d = 0; d < m_; ++d) cols.push_back(b * m_ + d);
      }
      row_ptr.push_back(static_cast<int>(cols.size()));
    }
  }
  pattern_ = CsrMatrix(num_dofs(), std::move(row_ptr), std::move(cols));

  const std::size_t n = static_cast<std::size_t>(3 * m_);
  positions_.resize(cells_.size() * n * n);
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      const int row = cells_[e].vertices[i / static_cast<std::size_t>(m_)] * m_ + static_cast<int>(i) % m_;
      for (std::size_t j = 0; j < n; ++j) {
        const int col = cells_[e].vertices[j / static_cast<std::size_t>(m_)] * m_ + static_cast<int>(j) % m_;
        positions_[(e * n + i) * n + j] = pattern_.find(row, col);
      }
    }
  }
}

Eigen::VectorXd Assembler::dirichlet_values(double t) const {
  const auto& conditions = form_.mesh_conditions();
  Eigen::VectorXd out(static_cast<Eigen::Index>(constrained_.size()));
  for (std::size_t k = 0; k < constrained_.size();) {
    const int a = constrained_[k] / m_;
    const Point x = mesh_->vertex(mesh_->active_vertices()[static_cast<std::size_t>(a)]);
    const auto& g = std::get<boundary::DirichletValue>(conditions[constrained_condition_[k]].condition).g;
    const State value = g(t, x);
    if (value.size() != m_) {
      throw Error(ErrorCode::kDimensionMismatch, "Dirichlet data has " + std::to_string(value.size()) +
                                                     " components, expected " + std::to_string(m_));
    }
    if (!value.allFinite()) non_finite("Dirichlet value", x);
    for (int c = 0; c < m_; ++c, ++k) out[static_cast<Eigen::Index>(k)] = value[c];
  }
  return out;
}

void Assembler::impose_dirichlet(Eigen::VectorXd& U, double t) const {
  const Eigen::VectorXd g = dirichlet_values(t);
  for (std::size_t k = 0; k < constrained_.size(); ++k) U[constrained_[k]] = g[static_cast<Eigen::Index>(k)];
}

void Assembler::gather(const CellData& cell, const Eigen::VectorXd& U, double* local) const {
  for (std::size_t k = 0; k < 3; ++k) {
    for (int c = 0; c < m_; ++c) local[k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c)] = U[cell.vertices[k] * m_ + c];
  }
}

Assembler::ExplicitTerms Assembler::explicit_terms(const CellData& cell,
                                                   const Eigen::VectorXd& previous,
                                                   double t) const {
  ExplicitTerms ex;
  std::array<State, 3> nodal;
  for (std::size_t k = 0; k < 3; ++k) nodal[k] = previous.segment(cell.vertices[k] * m_, m_);
  Flux grad = Flux::Zero(m_, 2);
  for (std::size_t k = 0; k < 3; ++k) grad += nodal[k] * cell.gradients[k].transpose();
  for (std::size_t q = 0; q < 3; ++q) {
    const auto& l = kVolumePoints[q];
    ex.previous[q] = l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2];
    ex.flux[q] = form_.explicit_flux(t, cell.points[q], ex.previous[q]);
    ex.source[q] = form_.explicit_source(t, cell.points[q], ex.previous[q], grad);
    if (!ex.flux[q].allFinite()) non_finite("convective flux", cell.points[q]);
    if (!ex.source[q].allFinite()) non_finite("explicit source", cell.points[q]);
  }
  const auto& conditions = form_.mesh_conditions();
  for (const auto& facet : cell.facets) {
    std::array<State, 2> g;
    for (std::size_t p = 0; p < 2; ++p) {
      const auto& l = facet.lambdas[p];
      const State u = l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2];
      const auto& bc = conditions[facet.condition].condition;
      if (const auto* c = std::get_if<boundary::FluxC>(&bc)) {
        g[p] = c->g_c(t, facet.points[p], u, facet.normal);
      } else if (const auto* pair = std::get_if<boundary::FluxPair>(&bc)) {
        g[p] = pair->convective.g_c(t, facet.points[p], u, facet.normal);
      } else {
        g[p] = State::Zero(m_);
      }
      if (!g[p].allFinite()) non_finite("boundary flux", facet.points[p]);
    }
    ex.facet.push_back(g);
  }
  return ex;
}

void Assembler::element_residual(const CellData& cell, const double* local, double t,
                                 const TimeLevel& level, const ExplicitTerms* ex,
                                 double* out) const {
  const std::size_t m = static_cast<std::size_t>(m_);
  std::array<State, 3> nodal;
  for (std::size_t k = 0; k < 3; ++k) {
    nodal[k].resize(m_);
    for (std::size_t c = 0; c < m; ++c) nodal[k][static_cast<Eigen::Index>(c)] = local[k * m + c];
  }
  Flux grad = Flux::Zero(m_, 2);
  for (std::size_t k = 0; k < 3; ++k) grad += nodal[k] * cell.gradients[k].transpose();

  std::fill(out, out + 3 * m, 0.0);
  for (std::size_t q = 0; q < 3; ++q) {
    const auto& l = kVolumePoints[q];
    const Point& x = cell.points[q];
    const State u = l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2];
    Flux flux;
    State source;
    if (ex) {
      flux = form_.implicit_flux(t, x, u, grad) + ex->flux[q];
      source = form_.implicit_source(t, x, u, grad) + ex->source[q];
      source -= form_.mass_weight(t, x) * (u - ex->previous[q]) / level.dt;
    } else {
      flux = form_.flux(t, x, u, grad);
      source = form_.source(t, x, u, grad);
    }
    if (!flux.allFinite()) non_finite("flux", x);
    if (!source.allFinite()) non_finite("source", x);
    for (std::size_t k = 0; k < 3; ++k) {
      const State contribution = flux * cell.gradients[k] - l[k] * source;
      for (std::size_t c = 0; c < m; ++c) out[k * m + c] += cell.weight * contribution[static_cast<Eigen::Index>(c)];
    }
  }

  const auto& conditions = form_.mesh_conditions();
  for (std::size_t f = 0; f < cell.facets.size(); ++f) {
    const auto& facet = cell.facets[f];
    const auto& bc = conditions[facet.condition].condition;
    for (std::size_t p = 0; p < 2; ++p) {
      const auto& l = facet.lambdas[p];
      const Point& x = facet.points[p];
      const State u = l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2];
      State g = State::Zero(m_);
      if (const auto* c = std::get_if<boundary::FluxC>(&bc)) {
        g = ex ? ex->facet[f][p] : c->g_c(t, x, u, facet.normal);
      } else if (const auto* v = std::get_if<boundary::FluxV>(&bc)) {
        g = -v->g_v(t, x, u, grad, facet.normal);
      } else if (const auto* pair = std::get_if<boundary::FluxPair>(&bc)) {
        g = (ex ? ex->facet[f][p] : pair->convective.g_c(t, x, u, facet.normal)) -
            pair->viscous.g_v(t, x, u, grad, facet.normal);
      }
      if (!g.allFinite()) non_finite("boundary flux", x);
      for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t c = 0; c < m; ++c) out[k * m + c] += facet.weight * l[k] * g[static_cast<Eigen::Index>(c)];
      }
    }
  }
}

void Assembler::run(const Eigen::VectorXd& U, double t, const TimeLevel& level,
                    bool with_jacobian, std::vector<double>& residuals,
                    std::vector<double>& jacobians) const {
  if (U.size() != num_dofs()) {
    throw Error(ErrorCode::kDimensionMismatch, "state has " + std::to_string(U.size()) +
                                                   " dofs, mesh needs " + std::to_string(num_dofs()));
  }
  if (level.active()) {
    if (level.previous->size() != num_dofs()) {
      throw Error(ErrorCode::kDimensionMismatch, "previous state has the wrong size");
    }
    if (!(level.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "time step must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(3 * m_);
  residuals.assign(cells_.size() * n, 0.0);
  if (with_jacobian) jacobians.assign(cells_.size() * n * n, 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> local(n), plus(n), minus(n), base(n);
    for (std::size_t e = begin; e < end; ++e) {
      const CellData& cell = cells_[e];
      ExplicitTerms ex;
      const ExplicitTerms* exp = nullptr;
      if (level.active()) {
        ex = explicit_terms(cell, *level.previous, t - level.dt);
        exp = &ex;
      }
      gather(cell, U, local.data());
      element_residual(cell, local.data(), t, level, exp, &residuals[e * n]);
      if (!with_jacobian) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double h = options_.fd_step * (1.0 + std::abs(local[j]));
        const double saved = local[j];
        local[j] = saved + h;
        element_residual(cell, local.data(), t, level, exp, plus.data());
        local[j] = saved - h;
        element_residual(cell, local.data(), t, level, exp, minus.data());
        local[j] = saved;
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t i = 0; i < n; ++i) jacobians[(e * n + i) * n + j] = (plus[i] - minus[i]) * inv;
      }
    }
  };

  const std::size_t count = cells_.size();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads_), std::max<std::size_t>(1, count / 64));
  if (workers <= 1) {
    work(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

Eigen::VectorXd Assembler::scatter_residual(const std::vector<double>& residuals) const {
  const std::size_t n = static_cast<std::size_t>(3 * m_);
  Eigen::VectorXd R = Eigen::VectorXd::Zero(num_dofs());
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      R[cells_[e].vertices[i / static_cast<std::size_t>(m_)] * m_ + static_cast<int>(i) % m_] += residuals[e * n + i];
    }
  }
  return R;
}

CsrMatrix Assembler::scatter_jacobian(const std::vector<double>& jacobians) const {
  CsrMatrix J = pattern_;
  auto& values = J.values();
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    values[static_cast<std::size_t>(positions_[k])] += jacobians[k];
  }
  return J;
}

Eigen::VectorXd Assembler::raw_residual(const Eigen::VectorXd& U, double t,
                                        const TimeLevel& level) const {
  std::vector<double> residuals, jacobians;
  run(U, t, level, false, residuals, jacobians);
  return scatter_residual(residuals);
}

Eigen::VectorXd Assembler::residual(const Eigen::VectorXd& U, double t,
                                    const TimeLevel& level) const {
  Eigen::VectorXd R = raw_residual(U, t, level);
  const Eigen::VectorXd g = dirichlet_values(t);
  for (std::size_t k = 0; k < constrained_.size(); ++k) {
    R[constrained_[k]] = U[constrained_[k]] - g[static_cast<Eigen::Index>(k)];
  }
  return R;
}

CsrMatrix Assembler::raw_jacobian(const Eigen::VectorXd& U, double t,
                                  const TimeLevel& level) const {
  std::vector<double> residuals, jacobians;
  run(U, t, level, true, residuals, jacobians);
  return scatter_jacobian(jacobians);
}

AssembledSystem Assembler::assemble(const Eigen::VectorXd& U, double t,
                                    const TimeLevel& level) const {
  std::vector<double> residuals, jacobians;
  run(U, t, level, true, residuals, jacobians);
  AssembledSystem sys;
  sys.residual = scatter_residual(residuals);
  sys.jacobian = scatter_jacobian(jacobians);

  const Eigen::VectorXd g = dirichlet_values(t);
  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(num_dofs());  // Newton update of constrained dofs
  for (std::size_t k = 0; k < constrained_.size(); ++k) {
    const int dof = constrained_[k];
    sys.residual[dof] = U[dof] - g[static_cast<Eigen::Index>(k)];
    fixed[dof] = -sys.residual[dof];
  }
  sys.rhs = -sys.residual;
  const auto& ptr = sys.jacobian.row_ptr();
  const auto& cols = sys.jacobian.cols();
  auto& values = sys.jacobian.values();
  for (int r = 0; r < sys.jacobian.rows(); ++r) {
    const bool row_fixed = is_constrained_[static_cast<std::size_t>(r)] != 0;
    for (int k = ptr[static_cast<std::size_t>(r)]; k < ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = cols[static_cast<std::size_t>(k)];
      auto& a = values[static_cast<std::size_t>(k)];
      if (row_fixed) {
        a = (c == r) ? 1.0 : 0.0;
      } else if (is_constrained_[static_cast<std::size_t>(c)]) {
        sys.rhs[r] -= a * fixed[c];
        a = 0.0;
      }
    }
  }
  return sys;
}

AssembledSystem assemble(const model::WeakFormResidual& form, MeshPtr mesh, double t,
                         const DiscreteField* U) {
  Assembler assembler(form, mesh);
  const Eigen::VectorXd state = U ? U->values() : Eigen::VectorXd::Zero(assembler.num_dofs());
  return assembler.assemble(state, t);
}

}  // namespace ddfem::fem
