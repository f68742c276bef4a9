#include "ddfem/model/problems.hpp"

#include "ddfem/error.hpp"
#include "ddfem/expression.hpp"

namespace ddfem::model {

namespace {

using Env = Expression::Env;

std::vector<ProblemInfo> make_table() {
  return {
      {"poisson", 1, {{"f", "-1"}}, "-div grad u = f"},
      {"advection_diffusion",
       1,
       {{"D", "0.1 - 0.05 * dot(x, x)"},
        {"b", "3 * [x[1], -x[0]]"},
        {"c", "0.01"},
        {"f", "0.1 * (1 - dot(x, x))"}},
       "-div(D grad u) + div(b u) + c u = f"},
      {"heat_neumann", 1, {{"D", "1"}}, "d_t u = div(D grad u) [+ f]"},
      {"reaction3",
       3,
       {{"D", "0.001"},
        {"k", "10"},
        {"F",
         "(t < 10) * [5 * (norm(x - [-0.25, -0.25]) < 0.04), "
         "5 * (norm(x - [0.25, 0.25]) < 0.04), 0]"}},
       "three species with sources F and reaction R(u) = (u0 u1, u0 u1, -2 u0 u1)"},
  };
}

/// Resolves coefficient `key` from the overrides or the problem defaults.
class Coefficients {
 public:
  Coefficients(const ProblemInfo& info, const CoefficientOverrides& overrides) : info_(info) {
    for (const auto& [key, source] : overrides) {
      if (key == "f" && info.name == "heat_neumann") continue;
      if (key == "V" && info.name == "reaction3") continue;
      if (!info.coefficients.count(key)) {
        std::string known;
        for (const auto& [k, v] : info.coefficients) known += (known.empty() ? "" : ", ") + k;
        if (info.name == "heat_neumann") known += ", f";
        if (info.name == "reaction3") known += ", V";
        throw Error(ErrorCode::kNotFound, "problem '" + info.name + "' has no coefficient '" +
                                              key + "'; known: " + known);
      }
    }
    overrides_ = overrides;
  }

  Expression get(const std::string& key) const {
    const auto it = overrides_.find(key);
    if (it != overrides_.end()) return Expression::parse(it->second);
    return Expression::parse(info_.coefficients.at(key));
  }
  bool overridden(const std::string& key) const { return overrides_.count(key) != 0; }

 private:
  const ProblemInfo& info_;
  CoefficientOverrides overrides_;
};

double scalar_at(const Expression& e, double t, const Point& x, const State& U) {
  Env env;
  env.t = t;
  env.x = &x;
  env.U = &U;
  return e.evaluate_scalar(env);
}

Point vector_at(const Expression& e, double t, const Point& x, const State& U) {
  Env env;
  env.t = t;
  env.x = &x;
  env.U = &U;
  const auto v = e.evaluate(env);
  if (v.size() != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient '" + e.source() + "' has " +
                                                   std::to_string(v.size()) +
                                                   " entries, expected " +
                                                   std::to_string(x.size()));
  }
  return v.head(x.size());
}

State state_at(const Expression& e, double t, const Point& x, const State& U, int m) {
  Env env;
  env.t = t;
  env.x = &x;
  env.U = &U;
  return e.evaluate_state(env, m);
}

ViscousFluxFn diffusion(Expression D) {
  return [D](double t, const Point& x, const State& U, const Flux& DU) {
    return Flux(scalar_at(D, t, x, U) * DU);
  };
}

ConvectiveFluxFn transport(Expression b) {
  return [b](double t, const Point& x, const State& U) {
    return Flux(U * vector_at(b, t, x, U).transpose());
  };
}

}  // namespace

std::vector<ProblemInfo> builtin_problems() { return make_table(); }

const ProblemInfo& problem_info(const std::string& name) {
  static const std::vector<ProblemInfo> table = make_table();
  for (const auto& p : table) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : table) known += (known.empty() ? "" : ", ") + p.name;
  throw Error(ErrorCode::kNotFound, "unknown problem '" + name + "'; available: " + known);
}

PdeModel make_problem(const std::string& name, int dim, const CoefficientOverrides& overrides) {
  const ProblemInfo& info = problem_info(name);
  const Coefficients coeff(info, overrides);
  PdeModel model;
  model.dim = dim;
  model.components = info.components;

  if (name == "poisson") {
    model.viscous_flux = [](double, const Point&, const State&, const Flux& DU) { return DU; };
    const Expression f = coeff.get("f");
    model.implicit_source = [f](double t, const Point& x, const State& U, const Flux&) {
      return state_at(f, t, x, U, 1);
    };
  } else if (name == "advection_diffusion") {
    model.viscous_flux = diffusion(coeff.get("D"));
    model.convective_flux = transport(coeff.get("b"));
    const Expression c = coeff.get("c");
    const Expression f = coeff.get("f");
    model.implicit_source = [c, f](double t, const Point& x, const State& U, const Flux&) {
      return State(state_at(f, t, x, U, 1) - scalar_at(c, t, x, U) * U);
    };
  } else if (name == "heat_neumann") {
    model.viscous_flux = diffusion(coeff.get("D"));
    if (overrides.count("f")) {
      const Expression f = Expression::parse(overrides.at("f"));
      model.implicit_source = [f](double t, const Point& x, const State& U, const Flux&) {
        return state_at(f, t, x, U, 1);
      };
    }
  } else {
    model.viscous_flux = diffusion(coeff.get("D"));
    if (overrides.count("V")) model.convective_flux = transport(Expression::parse(overrides.at("V")));
    const Expression k = coeff.get("k");
    const Expression F = coeff.get("F");
    model.explicit_source = [k, F](double t, const Point& x, const State& U, const Flux&) {
      const double r = U[0] * U[1];
      State reaction(3);
      reaction << r, r, -2.0 * r;
      return State(state_at(F, t, x, U, 3) - scalar_at(k, t, x, U) * reaction);
    };
  }
  return model;
}

}  // namespace ddfem::model
