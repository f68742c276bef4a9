#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddfem/model/pde_model.hpp"

namespace ddfem::model {

/// Coefficient overrides for a built-in problem, as expression sources over
/// t, x and U (see Expression).
using CoefficientOverrides = std::map<std::string, std::string>;

struct ProblemInfo {
  std::string name;
  int components = 1;
  /// Coefficient name -> default expression.
  std::map<std::string, std::string> coefficients;
  std::string description;
};

/// poisson, advection_diffusion, heat_neumann, reaction3.
std::vector<ProblemInfo> builtin_problems();
const ProblemInfo& problem_info(const std::string& name);

/// Builds the named problem with an empty boundary map. Unknown names or
/// coefficient keys throw Error(kNotFound) listing the valid ones.
///
///   poisson              F_v = grad U, S_i = f                      (f = -1)
///   advection_diffusion  F_v = D grad U, F_c = U (x) b, S_i = f - c U
///   heat_neumann         F_v = D grad U [, S_i = f if f is given]
///   reaction3            F_v = D grad U, S_e = F(t, x) - k R(U)
///                        [, F_c = U (x) V if V is given]
PdeModel make_problem(const std::string& name, int dim,
                      const CoefficientOverrides& overrides = {});

}  // namespace ddfem::model
