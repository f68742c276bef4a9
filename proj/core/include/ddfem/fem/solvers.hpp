#pragma once

#include <string>
#include <vector>

#include "ddfem/fem/assembly.hpp"
#include "ddfem/model/pde_model.hpp"

namespace ddfem::fem {

struct NewtonOptions {
  /// Stop once the Euclidean norm of the residual is at most this.
  double absolute_tolerance = 1e-9;
  int max_iterations = 25;
  /// Smallest damping factor tried by the halving line search.
  double min_damping = 1.0 / 1024.0;
  LinearSolverOptions linear;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_norms;
  int linear_iterations = 0;
  std::string linear_method;
  bool converged = false;
};

/// Damped Newton iteration on the assembled residual. Throws
/// Error(kNotConverged) if the tolerance is not met or a linear solve fails.
DiscreteField solve_newton(const Assembler& assembler, const DiscreteField& initial, double t,
                           const NewtonOptions& options = {}, NewtonReport* report = nullptr,
                           const TimeLevel& level = {});
DiscreteField solve_newton(const model::WeakFormResidual& form, MeshPtr mesh,
                           const DiscreteField& initial, const NewtonOptions& options = {},
                           NewtonReport* report = nullptr);

/// One IMEX step from U_prev to time t_new = t_prev + dt: F_v and S_i
/// implicit, F_c and S_e (and convective boundary data) explicit.
DiscreteField step_semi_implicit(const Assembler& assembler, const DiscreteField& previous,
                                 double t_new, double dt, const NewtonOptions& options = {},
                                 NewtonReport* report = nullptr);
DiscreteField step_semi_implicit(const model::PdeModel& model, MeshPtr mesh,
                                 const DiscreteField& previous, double t_new, double dt,
                                 const NewtonOptions& options = {}, NewtonReport* report = nullptr);

}  // namespace ddfem::fem
