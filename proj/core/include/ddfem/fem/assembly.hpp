#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ddfem/fem/field.hpp"
#include "ddfem/fem/mesh.hpp"
#include "ddfem/fem/sparse.hpp"
#include "ddfem/model/weak_form.hpp"

namespace ddfem::fem {

/// Worker threads for element loops: DDFEM_THREADS if set to a positive
/// integer, otherwise the hardware concurrency.
int default_thread_count();

struct AssemblyOptions {
  /// 0 selects default_thread_count().
  int threads = 0;
  /// Relative step of the central-difference element Jacobian.
  double fd_step = 1e-7;
};

/// Previous time level of a semi-implicit step. Without it the residual is
/// the stationary one with every term implicit.
struct TimeLevel {
  const Eigen::VectorXd* previous = nullptr;
  double dt = 0.0;

  bool active() const noexcept { return previous != nullptr; }
};

struct AssembledSystem {
  /// d residual / dU; rows of Dirichlet dofs replaced by the identity and
  /// their columns eliminated, so self-adjoint forms give symmetric systems.
  CsrMatrix jacobian;
  /// Residual vector; Dirichlet rows hold U_i - g_i.
  Eigen::VectorXd residual;
  /// Right-hand side of the Newton correction, jacobian * dU = rhs.
  Eigen::VectorXd rhs;
};

/// P1 discretisation of a weak-form residual on the active cells of a mesh.
///
/// Stationary residual of test function v:
///   int (F_v - F_c)(U) : grad v - (S_i + S_e)(U) . v  +  facet terms
/// Semi-implicit residual (explicit terms at t - dt):
///   int w (U - U_old)/dt . v + (F_v(U) - F_c(U_old)) : grad v
///       - (S_i(U) + S_e(U_old)) . v  +  facet terms
/// with w the mass weight of the form. Facet terms integrate (g_c - g_v) . v
/// over active-boundary facets whose first matching mesh condition is a flux
/// condition; g_c is explicit in semi-implicit steps. Volume integrals use
/// the 3-point order-2 rule, facets 2-point Gauss.
class Assembler {
 public:
  Assembler(model::WeakFormResidual form, MeshPtr mesh, AssemblyOptions options = {});

  const model::WeakFormResidual& form() const noexcept { return form_; }
  const MeshPtr& mesh() const noexcept { return mesh_; }
  int components() const noexcept { return m_; }
  int num_dofs() const noexcept { return m_ * mesh_->num_active_vertices(); }
  int threads() const noexcept { return threads_; }

  /// Sorted dofs fixed by Dirichlet mesh conditions.
  const std::vector<int>& constrained_dofs() const noexcept { return constrained_; }
  /// Dirichlet data at time t, aligned with constrained_dofs().
  Eigen::VectorXd dirichlet_values(double t) const;
  void impose_dirichlet(Eigen::VectorXd& U, double t) const;

  /// Residual without Dirichlet rows replaced.
  Eigen::VectorXd raw_residual(const Eigen::VectorXd& U, double t,
                               const TimeLevel& level = {}) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& U, double t, const TimeLevel& level = {}) const;
  /// Jacobian without Dirichlet treatment (for checks against the residual).
  CsrMatrix raw_jacobian(const Eigen::VectorXd& U, double t, const TimeLevel& level = {}) const;
  AssembledSystem assemble(const Eigen::VectorXd& U, double t, const TimeLevel& level = {}) const;

 private:
  struct FacetTerm {
    std::size_t condition = 0;
    Point normal;
    std::array<Point, 2> points;
    std::array<std::array<double, 3>, 2> lambdas{};
    double weight = 0.0;  // per Gauss point
  };
  struct CellData {
    int id = 0;
    std::array<int, 3> vertices{};  // active indices
    std::array<Point, 3> gradients;
    std::array<Point, 3> points;  // quadrature points
    double weight = 0.0;          // per quadrature point
    std::vector<FacetTerm> facets;
  };
  // Terms of a semi-implicit step that depend only on U_old.
  struct ExplicitTerms {
    std::array<State, 3> previous;
    std::array<Flux, 3> flux;
    std::array<State, 3> source;
    std::vector<std::array<State, 2>> facet;
  };

  void gather(const CellData& cell, const Eigen::VectorXd& U, double* local) const;
  ExplicitTerms explicit_terms(const CellData& cell, const Eigen::VectorXd& previous,
                               double t) const;
  void element_residual(const CellData& cell, const double* local, double t,
                        const TimeLevel& level, const ExplicitTerms* ex, double* out) const;
  void run(const Eigen::VectorXd& U, double t, const TimeLevel& level, bool with_jacobian,
           std::vector<double>& residuals, std::vector<double>& jacobians) const;
  Eigen::VectorXd scatter_residual(const std::vector<double>& residuals) const;
  CsrMatrix scatter_jacobian(const std::vector<double>& jacobians) const;

  model::WeakFormResidual form_;
  MeshPtr mesh_;
  AssemblyOptions options_;
  int m_;
  int threads_;
  std::vector<CellData> cells_;
  CsrMatrix pattern_;
  std::vector<std::ptrdiff_t> positions_;  // per cell, (3m)^2 entries
  std::vector<int> constrained_;
  std::vector<std::size_t> constrained_condition_;
  std::vector<std::uint8_t> is_constrained_;
};

/// One-shot assembly at U (zero if absent) for the stationary form.
AssembledSystem assemble(const model::WeakFormResidual& form, MeshPtr mesh, double t,
                         const DiscreteField* U = nullptr);

}  // namespace ddfem::fem
