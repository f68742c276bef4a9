#include "ddfem/fem/solvers.hpp"

#include <cmath>
#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::fem {

DiscreteField solve_newton(const Assembler& assembler, const DiscreteField& initial, double t,
                           const NewtonOptions& options, NewtonReport* report,
                           const TimeLevel& level) {
  if (initial.components() != assembler.components() ||
      initial.size() != assembler.num_dofs()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial guess does not match the discretisation");
  }
  NewtonReport local;
  NewtonReport& rep = report ? *report : local;
  rep = NewtonReport{};

  Eigen::VectorXd U = initial.values();
  assembler.impose_dirichlet(U, t);
  for (int it = 0;; ++it) {
    const AssembledSystem sys = assembler.assemble(U, t, level);
    const double norm = sys.residual.norm();
    if (!std::isfinite(norm)) throw Error(ErrorCode::kNonFinite, "Newton residual is not finite");
    rep.residual_norms.push_back(norm);
    rep.iterations = it;
    if (norm <= options.absolute_tolerance) {
      rep.converged = true;
      break;
    }
    if (it >= options.max_iterations) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << options.max_iterations
          << " iterations; residual norm " << norm << " > " << options.absolute_tolerance;
      throw Error(ErrorCode::kNotConverged, msg.str());
    }
    const LinearSolveResult lin = solve_linear(sys.jacobian, sys.rhs, options.linear);
    rep.linear_iterations += lin.iterations;
    rep.linear_method = lin.method;
    if (!lin.converged) {
      std::ostringstream msg;
      msg << "linear solver (" << lin.method << ") stalled at relative residual "
          << lin.relative_residual << " after " << lin.iterations << " iterations";
      throw Error(ErrorCode::kNotConverged, msg.str());
    }
    double damping = 1.0;
    Eigen::VectorXd trial = U + lin.x;
    for (;;) {
      const double trial_norm = assembler.residual(trial, t, level).norm();
      if ((std::isfinite(trial_norm) && trial_norm < (1.0 - 1e-4 * damping) * norm) ||
          damping <= options.min_damping) {
        break;
      }
      damping *= 0.5;
      trial = U + damping * lin.x;
    }
    U = std::move(trial);
  }
  return DiscreteField(assembler.mesh(), assembler.components(), std::move(U));
}

DiscreteField solve_newton(const model::WeakFormResidual& form, MeshPtr mesh,
                           const DiscreteField& initial, const NewtonOptions& options,
                           NewtonReport* report) {
  const Assembler assembler(form, std::move(mesh));
  return solve_newton(assembler, initial, form.time(), options, report);
}

DiscreteField step_semi_implicit(const Assembler& assembler, const DiscreteField& previous,
                                 double t_new, double dt, const NewtonOptions& options,
                                 NewtonReport* report) {
  const TimeLevel level{&previous.values(), dt};
  return solve_newton(assembler, previous, t_new, options, report, level);
}

DiscreteField step_semi_implicit(const model::PdeModel& model, MeshPtr mesh,
                                 const DiscreteField& previous, double t_new, double dt,
                                 const NewtonOptions& options, NewtonReport* report) {
  const Assembler assembler(model::model_to_weak_form(model, t_new), std::move(mesh));
  return step_semi_implicit(assembler, previous, t_new, dt, options, report);
}

}  // namespace ddfem::fem
