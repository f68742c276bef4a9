#include <doctest.h>

#include <random>

#include "ddfem/error.hpp"
#include "ddfem/model/problems.hpp"
#include "ddfem/model/weak_form.hpp"
#include "oracles.hpp"

using namespace ddfem;
using namespace ddfem::model;

namespace {

Point p2(double x, double y) { return make_point({x, y}); }

Flux flux2(double a, double b) {
  Flux f(1, 2);
  f << a, b;
  return f;
}

PdeModel laplace() {
  PdeModel m;
  m.viscous_flux = [](double, const Point&, const State&, const Flux& DU) { return DU; };
  return m;
}

}  // namespace

TEST_CASE("poisson integrand") {
  const auto form = model_to_weak_form(make_problem("poisson", 2));
  const State U = make_state({0.0});
  const Flux zero = Flux::Zero(1, 2);
  CHECK(evaluate_residual_integrand(form, 0.0, p2(0.1, 0.2), U, zero, make_state({1.0}), zero) == 1.0);
  CHECK(evaluate_residual_integrand(form, 0.0, p2(0.1, 0.2), U, zero, make_state({0.0}), zero) == 0.0);
  // grad U : grad v + v
  const double value = evaluate_residual_integrand(form, 0.0, p2(0, 0), make_state({3.0}), flux2(1, 2),
                                                   make_state({0.5}), flux2(4, -1));
  CHECK(value == doctest::Approx(1 * 4 + 2 * -1 + 0.5));
}

TEST_CASE("all-zero model is rejected") {
  PdeModel empty;
  try {
    model_to_weak_form(empty);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidModel);
  }
  PdeModel wide = laplace();
  wide.components = 9;
  CHECK_THROWS_AS(validate(wide), Error);
}

TEST_CASE("advection-diffusion coefficients") {
  const auto m = make_problem("advection_diffusion", 2);
  REQUIRE(m.has_viscous_flux());
  REQUIRE(m.has_convective_flux());
  REQUIRE(m.has_implicit_source());
  CHECK_FALSE(m.has_explicit_source());
  const Point x = p2(0.4, -0.3);
  const double r2 = 0.25;
  const State U = make_state({2.0});
  const Flux DU = flux2(0.7, -1.1);
  const double D = 0.1 - 0.05 * r2;
  const Flux Fv = m.viscous_flux(0.0, x, U, DU);
  CHECK(Fv(0, 0) == doctest::Approx(D * 0.7));
  CHECK(Fv(0, 1) == doctest::Approx(D * -1.1));
  const Flux Fc = m.convective_flux(0.0, x, U);
  CHECK(Fc(0, 0) == doctest::Approx(2.0 * 3 * -0.3));
  CHECK(Fc(0, 1) == doctest::Approx(2.0 * -3 * 0.4));
  CHECK(m.implicit_source(0.0, x, U, DU)[0] == doctest::Approx(0.1 * (1 - r2) - 0.01 * 2.0));
}

TEST_CASE("coefficient overrides") {
  const auto m = make_problem("advection_diffusion", 2, {{"D", "1 - 0.05 * dot(x, x)"}});
  const Flux Fv = m.viscous_flux(0.0, p2(1, 1), make_state({0.0}), flux2(1, 0));
  CHECK(Fv(0, 0) == doctest::Approx(0.9));
  try {
    make_problem("poisson", 2, {{"D", "1"}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
    CHECK(std::string(e.what()).find("f") != std::string::npos);
  }
  CHECK_THROWS_AS(make_problem("navier_stokes", 2), Error);
  CHECK(problem_info("reaction3").components == 3);
  CHECK(builtin_problems().size() == 4);
}

TEST_CASE("heat and reaction problems") {
  const auto heat = make_problem("heat_neumann", 2);
  CHECK(heat.has_viscous_flux());
  CHECK_FALSE(heat.has_implicit_source());
  const auto forced = make_problem("heat_neumann", 2, {{"f", "2"}});
  CHECK(forced.implicit_source(0.0, p2(0, 0), make_state({0.0}), Flux::Zero(1, 2))[0] == 2.0);

  const auto r = make_problem("reaction3", 2);
  CHECK(r.components == 3);
  CHECK(r.has_explicit_source());
  const State U = make_state({1.0, 2.0, 0.0});
  const State S = r.explicit_source(0.0, p2(-0.25, -0.25), U, Flux::Zero(3, 2));
  // F = (5, 0, 0) at the first source; R(U) = (u0 u1, u0 u1, -2 u0 u1), k = 10.
  CHECK(S[0] == doctest::Approx(5.0 - 10.0 * 2.0));
  CHECK(S[1] == doctest::Approx(-10.0 * 2.0));
  CHECK(S[2] == doctest::Approx(10.0 * 4.0));
  const State late = r.explicit_source(11.0, p2(-0.25, -0.25), U, Flux::Zero(3, 2));
  CHECK(late[0] == doctest::Approx(-20.0));
}

TEST_CASE("integrand is linear in the test function") {
  const auto form = model_to_weak_form(make_problem("advection_diffusion", 2));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Point x = p2(u(rng), u(rng));
    const State U = make_state({u(rng)});
    const Flux DU = flux2(u(rng), u(rng));
    const State v1 = make_state({u(rng)});
    const State v2 = make_state({u(rng)});
    const Flux Dv1 = flux2(u(rng), u(rng));
    const Flux Dv2 = flux2(u(rng), u(rng));
    const double a = u(rng);
    const double b = u(rng);
    const double lhs = form.integrand(0.0, x, U, DU, (a * v1 + b * v2).eval(), (a * Dv1 + b * Dv2).eval());
    const double rhs = a * form.integrand(0.0, x, U, DU, v1, Dv1) + b * form.integrand(0.0, x, U, DU, v2, Dv2);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    const double twice = form.integrand(0.0, x, U, DU, (2.0 * v1).eval(), (2.0 * Dv1).eval());
    CHECK(twice == doctest::Approx(2.0 * form.integrand(0.0, x, U, DU, v1, Dv1)));
  }
}

TEST_CASE("integrand shape checks") {
  const auto form = model_to_weak_form(laplace());
  CHECK_THROWS_AS(form.integrand(0.0, p2(0, 0), make_state({0.0, 1.0}), Flux::Zero(1, 2),
                                 make_state({1.0}), Flux::Zero(1, 2)),
                  Error);
}

TEST_CASE("boundary entries in the weak form") {
  PdeModel m = laplace();
  m.boundary.add(boundary::whole_mesh_boundary(),
                 boundary::DirichletValue{[](double, const Point&) { return make_state({1.0}); }});
  m.boundary.add("Omega", boundary::FluxV{[](double, const Point&, const State& U, const Flux&,
                                            const Point&) { return State::Zero(U.size()).eval(); }});
  const auto form = model_to_weak_form(m);
  CHECK(form.mesh_conditions().size() == 1);
  CHECK(form.dirichlet_constraints().size() == 1);

  PdeModel diffuse = laplace();
  diffuse.boundary.add("Omega",
                       boundary::DirichletValue{[](double, const Point&) { return make_state({1.0}); }});
  try {
    model_to_weak_form(diffuse);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUntransformed);
  }
}

TEST_CASE("mass weight defaults to one") {
  const auto form = model_to_weak_form(laplace());
  CHECK(form.mass_weight(0.0, p2(3, 4)) == 1.0);
  PdeModel weighted = laplace();
  weighted.mass_weight = [](double, const Point& x) { return x[0]; };
  CHECK(model_to_weak_form(weighted).mass_weight(0.0, p2(3, 4)) == 3.0);
}
