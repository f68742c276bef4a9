// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ddfem/error.hpp"
#include "ddfem/fem/assembly.hpp"
#include "ddfem/fem/norms.hpp"
#include "ddfem/fem/solvers.hpp"
#include "ddfem/geometry/domain.hpp"
#include "ddfem/model/problems.hpp"
#include "ddfem/model/weak_form.hpp"
#include "ddfem/transform/transform.hpp"
#include "oracles.hpp"
#include "scene.hpp"

using namespace ddfem;

namespace {

using Clock = std::chrono::steady_clock;
using DomainPtr = std::shared_ptr<const geometry::DomainGeometry>;

struct Outcome {
  bool passed = false;
  std::string detail;
};

Point p2(double x, double y) { return make_point({x, y}); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

DomainPtr make_domain(geometry::Sdf root, double eps) {
  root->set_epsilon(eps);
  return std::make_shared<const geometry::DomainGeometry>(root);
}

DomainPtr two_balls(double eps) {
  return make_domain(geometry::named(geometry::ball(1.0, p2(-0.5, 0), "Ball0") |
                                         geometry::ball(1.0, p2(0.5, 0), "Ball1"),
                                     "Omega"),
                     eps);
}

boundary::DirichletValue dirichlet(double g) {
  return {[g](double, const Point&) { return make_state({g}); }};
}

boundary::FluxPair zero_flux_pair() {
  return {boundary::FluxC{[](double, const Point&, const State& U, const Point&) {
            return State::Zero(U.size()).eval();
          }},
          boundary::FluxV{[](double, const Point&, const State& U, const Flux&, const Point&) {
            return State::Zero(U.size()).eval();
          }}};
}

const Point kIntersectionTop = p2(0.0, std::sqrt(0.75));
const Point kIntersectionBottom = p2(0.0, -std::sqrt(0.75));

// Points at signed offsets from the far arc of the unit circle around
// `centre` (the part outside the other ball), kept > `clearance` from both
// intersection points of the two circles.
std::vector<Point> far_arc_points(const Point& centre, double side, double clearance,
                                  const std::vector<double>& offsets) {
  std::vector<Point> points;
  for (int k = 0; k < 240; ++k) {
    const double theta = 2.0 * M_PI * k / 240.0;
    const Point on_arc = centre + p2(std::cos(theta), std::sin(theta));
    if (side * on_arc[0] <= 0.0) continue;
    if ((on_arc - kIntersectionTop).norm() <= clearance) continue;
    if ((on_arc - kIntersectionBottom).norm() <= clearance) continue;
    for (double s : offsets) points.push_back(centre + (1.0 + s) * p2(std::cos(theta), std::sin(theta)));
  }
  return points;
}

// Value of a P1 field at x, or nullopt outside the active cells.
std::optional<State> point_value(const fem::DiscreteField& U, const Point& x) {
  const auto& mesh = *U.mesh();
  const int i = std::min(mesh.nx() - 1, static_cast<int>(std::floor((x[0] - mesh.lower()[0]) / mesh.hx())));
  const int j = std::min(mesh.ny() - 1, static_cast<int>(std::floor((x[1] - mesh.lower()[1]) / mesh.hy())));
  if (i < 0 || j < 0) return std::nullopt;
  for (int k = 0; k < 2; ++k) {
    const int c = 2 * (j * mesh.nx() + i) + k;
    const auto v = mesh.cell(c);
    const Point a = mesh.vertex(v[0]);
    const Point b = mesh.vertex(v[1]);
    const Point d = mesh.vertex(v[2]);
    const double det = (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
    const double l1 = ((x[0] - a[0]) * (d[1] - a[1]) - (x[1] - a[1]) * (d[0] - a[0])) / det;
    const double l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) / det;
    const double l0 = 1.0 - l1 - l2;
    if (std::min({l0, l1, l2}) < -1e-12) continue;
    if (!mesh.active(c)) return std::nullopt;
    return U.evaluate(c, {l0, l1, l2});
  }
  return std::nullopt;
}

fem::MeshPtr filtered_mesh(const Point& lower, const Point& upper, int nx, int ny, const DomainPtr& domain) {
  return fem::filter_cells(*fem::build_mesh(lower, upper, nx, ny), *domain->root(),
                           10.0 * domain->epsilon());
}

// 1: CSG sign against point membership.
Outcome geometry_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240917);
  const auto points = testing::halton_2d(10000, -2.0, 2.0);
  long failures = 0;
  long skipped = 0;
  for (int t = 0; t < 20; ++t) {
    const auto tree = testing::random_tree(rng, 2 + t % 3);
    const auto sdf = tree->to_sdf();
    for (const auto& x : points) {
      if (tree->distance_to_circles(x) <= 1e-12) {
        ++skipped;
        continue;
      }
      failures += (sdf->value(x) < 0.0) != tree->inside(x);
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 5.0,
          fmt("20 trees x 10^4 points, %ld sign failures, %ld in band, %.2f s", failures, skipped, elapsed)};
}

// 2: phase-field identities.
Outcome phase_field_identities() {
  double worst_half = 0.0;
  double worst_sum = 0.0;
  double worst_chi = 0.0;
  double worst_delta = 0.0;
  for (double eps : {0.2, 0.05, 1e-3}) {
    // Points where the distance evaluates to exactly zero: the axis points of
    // a unit ball and the edges of a box.
    const auto disc = make_domain(geometry::ball(1.0, p2(0, 0)), eps);
    const auto square = make_domain(geometry::box(p2(0, 0), p2(0.5, 0.5)), eps);
    std::vector<std::pair<DomainPtr, Point>> zeros;
    for (const Point& x : {p2(1, 0), p2(-1, 0), p2(0, 1), p2(0, -1)}) zeros.emplace_back(disc, x);
    for (double t : {-0.25, 0.0, 0.125, 0.375}) {
      zeros.emplace_back(square, p2(0.5, t));
      zeros.emplace_back(square, p2(t, -0.5));
    }
    for (const auto& [domain, x] : zeros) {
      if (domain->sdf(x) != 0.0) return {false, "zero-level sample does not evaluate to r = 0"};
      worst_half = std::max(worst_half, std::abs(domain->phi(x) - 0.5));
      worst_delta = std::max(worst_delta, std::abs(domain->surface_delta(x) * 2.0 * eps / 3.0 - 1.0));
    }
    for (int k = 0; k <= 4000; ++k) {
      const double r = -20.0 * eps + 40.0 * eps * k / 4000.0;
      worst_sum = std::max(worst_sum, std::abs(geometry::phase_field(r, eps) + geometry::phase_field(-r, eps) - 1.0));
      if (std::abs(r) >= eps) {
        worst_chi = std::max(worst_chi, std::abs(geometry::phase_field(r, eps) - (r <= 0.0 ? 1.0 : 0.0)));
      }
    }
  }
  const bool ok = worst_half <= 1e-14 && worst_sum <= 1e-14 && worst_chi <= 0.0025 && worst_delta <= 1e-10;
  return {ok, fmt("|phi-0.5| %.1e, |phi(r)+phi(-r)-1| %.1e, max|phi-chi| %.6f, delta rel %.1e", worst_half,
                  worst_sum, worst_chi, worst_delta)};
}

// 3: normalized weights.
Outcome partition_of_unity() {
  const auto start = Clock::now();
  const double eps = 0.05;
  const auto domain = two_balls(eps);
  boundary::BoundaryMap map;
  map.add("Ball0", dirichlet(1.0)).add("Ball1", zero_flux_pair());
  const boundary::BoundaryTerms terms(domain, map, {true, true});
  double worst_sum = 0.0;
  for (int j = 0; j < 200; ++j) {
    for (int i = 0; i < 200; ++i) {
      const Point x = p2(-2.0 + 4.0 * (i + 0.5) / 200.0, -1.5 + 3.0 * (j + 0.5) / 200.0);
      const auto w = terms.normalized_weights(x);
      worst_sum = std::max(worst_sum, std::abs(w[0] + w[1] - 1.0));
    }
  }
  const std::vector<double> offsets{-eps, 0.0, eps};
  double worst_wrong = 0.0;
  std::size_t probes = 0;
  for (const auto& x : far_arc_points(p2(-0.5, 0), -1.0, 10.0 * eps, offsets)) {
    worst_wrong = std::max(worst_wrong, terms.normalized_weights(x)[1]);
    ++probes;
  }
  for (const auto& x : far_arc_points(p2(0.5, 0), 1.0, 10.0 * eps, offsets)) {
    worst_wrong = std::max(worst_wrong, terms.normalized_weights(x)[0]);
    ++probes;
  }
  const double elapsed = seconds_since(start);
  return {worst_sum <= 1e-12 && worst_wrong < 1e-6 && elapsed < 10.0,
          fmt("max|sum w - 1| %.1e on 200x200, max wrong weight %.1e over %zu arc probes, %.2f s", worst_sum,
              worst_wrong, probes, elapsed)};
}

// 4: manufactured Poisson convergence on the unit ball.
Outcome poisson_convergence() {
  const auto start = Clock::now();
  const auto exact = [](const Point& x) { return make_state({(x.squaredNorm() - 1.0) / 4.0}); };
  // The manufactured solution satisfies -lap u = -1 and vanishes on the circle.
  for (const auto& x : testing::halton_2d(50, -1.0, 1.0)) {
    const double d = 1e-3;
    double lap = -4.0 * exact(x)[0];
    for (const Point& e : {p2(d, 0), p2(-d, 0), p2(0, d), p2(0, -d)}) lap += exact(x + e)[0];
    if (std::abs(lap / (d * d) - 1.0) > 1e-6) return {false, "exact solution does not satisfy -lap u = -1"};
    if (std::abs(exact(x.normalized())[0]) > 1e-15) return {false, "exact solution is non-zero on the circle"};
  }
  std::vector<double> errors;
  std::string detail;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto domain = make_domain(geometry::ball(1.0, p2(0, 0), "Omega"), eps);
    auto problem = model::make_problem("poisson", 2);
    problem.boundary.add("Omega", dirichlet(0.0));
    problem.out_factor_implicit = 1.0;
    const auto transformed = transform::ddm1_transform(problem, domain);
    const int n = static_cast<int>(std::ceil(3.0 / (eps / 2.0) - 1e-9));
    const auto mesh = filtered_mesh(p2(-1.5, -1.5), p2(1.5, 1.5), n, n, domain);
    const fem::Assembler assembler(model::model_to_weak_form(transformed.model), mesh);
    const auto U = fem::solve_newton(assembler, fem::DiscreteField(mesh, 1), 0.0);
    errors.push_back(fem::error_norm_L2(U, exact, *domain, fem::Weight::kChi));
    detail += fmt("eps %.2f: %.4e; ", eps, errors.back());
  }
  const double elapsed = seconds_since(start);
  const bool decreasing = errors[1] < errors[0] && errors[2] < errors[1];
  return {decreasing && errors[2] <= 0.5 * errors[0] && elapsed < 60.0, detail + fmt("%.2f s", elapsed)};
}

// 5: the transformed integrand equals the original deep inside.
Outcome interior_consistency() {
  const double eps = 0.05;
  const auto domain = two_balls(eps);
  auto problem = model::make_problem("advection_diffusion", 2);
  const auto original = model::model_to_weak_form(problem);
  problem.boundary.add("Ball0", dirichlet(1.0));
  problem.boundary.add("Ball1", zero_flux_pair());
  problem.out_factor_implicit = 1.0;
  const auto transformed = model::model_to_weak_form(transform::ddm1_transform(problem, domain).model);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int sampled = 0;
  for (const auto& x : testing::halton_2d(20000, -1.5, 1.5)) {
    if (sampled == 1000) break;
    if (domain->sdf(x) > -10.0 * eps) continue;
    ++sampled;
    const State U = make_state({u(rng)});
    const State v = make_state({u(rng)});
    Flux DU(1, 2);
    Flux Dv(1, 2);
    DU << u(rng), u(rng);
    Dv << u(rng), u(rng);
    const double a = original.integrand(0.0, x, U, DU, v, Dv);
    const double b = transformed.integrand(0.0, x, U, DU, v, Dv);
    worst = std::max(worst, std::abs(a - b) / std::abs(a));
  }
  return {sampled == 1000 && worst <= 1e-12, fmt("%d points with r <= -10 eps, max relative difference %.1e", sampled, worst)};
}

// 6: zero-flux heat equation conserves the phi-weighted mass.
Outcome neumann_mass() {
  const auto start = Clock::now();
  const double eps = 0.05;
  const auto root = (geometry::ball(0.3, p2(0.15, 0.15)) | geometry::ball(0.3, p2(-0.15, -0.15))) &
                    geometry::ball(0.4, p2(0, 0));
  const auto domain = make_domain(geometry::named(root, "Omega"), eps);
  auto problem = model::make_problem("heat_neumann", 2);
  problem.boundary.add("Omega", boundary::FluxV{[](double, const Point&, const State& U, const Flux&,
                                                   const Point&) { return State::Zero(U.size()).eval(); }});
  const auto transformed = transform::ddm1_transform(problem, domain);
  const auto mesh = filtered_mesh(p2(-1, -1), p2(1, 1), 80, 80, domain);
  const fem::Assembler assembler(model::model_to_weak_form(transformed.model), mesh);
  auto U = fem::DiscreteField::interpolate(mesh, 1, [](const Point& x) {
    return make_state({1.0 + 0.5 * std::exp(-x.squaredNorm() / 0.02)});
  });
  const auto phi = fem::weight_function(domain.get(), fem::Weight::kPhi);
  const double initial = fem::integrate(U, 0, phi);
  const double dt = 1e-3;
  for (int n = 1; n <= 100; ++n) U = fem::step_semi_implicit(assembler, U, n * dt, dt);
  const double drift = std::abs(fem::integrate(U, 0, phi) - initial) / std::abs(initial);
  const double elapsed = seconds_since(start);
  return {drift <= 1e-3 && elapsed < 60.0, fmt("relative drift %.3e after 100 steps, %.2f s", drift, elapsed)};
}

// 7: Dirichlet data reaches Ball0 only.
Outcome mixed_locality() {
  const double eps = 0.05;
  const auto domain = two_balls(eps);
  auto problem = model::make_problem("advection_diffusion", 2, {{"D", "1 - 0.05 * dot(x, x)"}});
  problem.boundary.add("Ball0", dirichlet(1.0));
  problem.boundary.add("Ball1", zero_flux_pair());
  problem.out_factor_implicit = 1.0;
  const auto transformed = transform::ddm1_transform(problem, domain);
  const auto mesh = filtered_mesh(p2(-2, -1.5), p2(2, 1.5), 160, 120, domain);
  const fem::Assembler assembler(model::model_to_weak_form(transformed.model), mesh);
  const auto U = fem::solve_newton(assembler, fem::DiscreteField(mesh, 1), 0.0);

  const std::vector<double> offsets{-eps, -eps / 2.0, 0.0, eps / 2.0, eps};
  double worst_dirichlet = 0.0;
  for (const auto& x : far_arc_points(p2(-0.5, 0), -1.0, 10.0 * eps, offsets)) {
    const auto value = point_value(U, x);
    if (!value) return {false, "far-arc sample outside the active mesh"};
    worst_dirichlet = std::max(worst_dirichlet, std::abs((*value)[0] - 1.0));
  }
  double worst_penalty = 0.0;
  const Flux DU = Flux::Zero(1, 2);
  for (const auto& x : far_arc_points(p2(0.5, 0), 1.0, 10.0 * eps, offsets)) {
    const auto value = point_value(U, x);
    if (!value) return {false, "far-arc sample outside the active mesh"};
    worst_penalty = std::max(worst_penalty, transformed.components.outside(0.0, x, *value, DU).cwiseAbs().maxCoeff());
  }
  return {worst_dirichlet <= 0.05 && worst_penalty < 1e-6,
          fmt("max|U-1| near Ball0 %.3e, max penalty near Ball1 %.1e", worst_dirichlet, worst_penalty)};
}

// 8: posttransform exposes exactly the tabulated methods.
Outcome composition_table() {
  const auto domain = make_domain(geometry::ball(1.0, p2(0, 0), "Omega"), 0.1);
  int agreeing = 0;
  int cases = 0;
  for (int mask = 0; mask < 16; ++mask) {
    const bool fc = mask & 1;
    const bool fv = mask & 2;
    const bool sources = mask & 4;
    const bool factors = mask & 8;
    model::PdeModel m;
    if (fc) {
      m.convective_flux = [](double, const Point&, const State& U) {
        Flux f(1, 2);
        f << U[0], U[0];
        return f;
      };
    }
    if (fv) m.viscous_flux = [](double, const Point&, const State&, const Flux& DU) { return DU; };
    if (sources) {
      m.implicit_source = [](double, const Point&, const State& U, const Flux&) { return State(-U); };
      m.explicit_source = [](double, const Point& x, const State&, const Flux&) { return make_state({x[0]}); };
    }
    if (factors) {
      m.out_factor_implicit = 1.0;
      m.out_factor_explicit = 0.5;
    }
    ++cases;
    if (!fc && !fv && !sources) {
      try {
        transform::ddm1_transform(m, domain);
      } catch (const Error& e) {
        agreeing += e.code() == ErrorCode::kInvalidModel;
      }
      continue;
    }
    transform::SourceComposition expected;
    if (sources) expected.explicit_source.push_back("S_e_source");
    if (fc) expected.explicit_source.push_back("S_e_convection");
    if (factors) expected.explicit_source.push_back("S_outside");
    if (sources) expected.implicit_source.push_back("S_i_source");
    if (fv) expected.implicit_source.push_back("S_i_diffusion");
    if (factors) expected.implicit_source.push_back("S_outside");
    expected.convective_flux = fc;
    expected.viscous_flux = fv;
    const auto out = transform::ddm1_transform(m, domain);
    const bool exposed = out.model.has_convective_flux() == fc && out.model.has_viscous_flux() == fv &&
                         out.model.has_explicit_source() == !expected.explicit_source.empty() &&
                         out.model.has_implicit_source() == !expected.implicit_source.empty();
    agreeing += out.composition == expected && exposed;
  }
  return {agreeing == cases, fmt("%d of %d presence combinations (with and without outFactors) match", agreeing, cases)};
}

// 9: rendered contour topology and weight split.
Outcome figure_renders() {
  namespace fs = std::filesystem;
  const auto out_dir = fs::temp_directory_path() / "ddfem_acceptance";
  cli::CommandOptions options;
  options.out = out_dir;
  options.allow_coarse = true;
  options.field = "phi";
  const auto five = cli::load_scene(fs::path(DDFEM_SCENE_DIR) / "five_balls.json");
  const auto render = cli::cmd_render(five, options);

  const auto value = [&](int i, int j) { return render.values[static_cast<std::size_t>(j * render.nx + i)]; };
  const auto coordinate = [&](int i, int j) { return render.points[static_cast<std::size_t>(j * render.nx + i)]; };
  // Crossings of the 0.5 level along a grid line, located by linear
  // interpolation. Samples exactly at 0.5 count as outside, so a line that
  // only touches the contour (y = 0.5 is tangent to both lobes) has no
  // crossing there.
  const auto crossings = [&](bool along_x, int fixed) {
    std::vector<double> where;
    const int n = along_x ? render.nx : render.ny;
    for (int k = 0; k + 1 < n; ++k) {
      const double a = along_x ? value(k, fixed) : value(fixed, k);
      const double b = along_x ? value(k + 1, fixed) : value(fixed, k + 1);
      if ((a > 0.5) != (b > 0.5)) {
        const Point pa = along_x ? coordinate(k, fixed) : coordinate(fixed, k);
        const Point pb = along_x ? coordinate(k + 1, fixed) : coordinate(fixed, k + 1);
        const int axis = along_x ? 0 : 1;
        where.push_back(pa[axis] + (0.5 - a) / (b - a) * (pb[axis] - pa[axis]));
      }
    }
    return where;
  };
  const auto index_of = [&](int axis, double c) {
    const double lo = render.points.front()[axis];
    const double step = axis == 0 ? render.points[1][0] - lo : render.points[static_cast<std::size_t>(render.nx)][1] - lo;
    return static_cast<int>(std::lround((c - lo) / step));
  };
  const double tol = 0.02;
  const auto matches = [&](const std::vector<double>& got, const std::vector<double>& want) {
    if (got.size() != want.size()) return false;
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (std::abs(got[k] - want[k]) > tol) return false;
    }
    return true;
  };
  const double s = std::sqrt(0.75);
  const auto vertical = crossings(false, index_of(0, 0.0));
  const auto horizontal = crossings(true, index_of(1, 0.0));
  const auto upper = crossings(true, index_of(1, 0.5));
  const bool topology = matches(vertical, {-0.3, 0.3}) && matches(horizontal, {-1.4, 1.4}) &&
                        matches(upper, {-s, -0.4, 0.4, s});

  const auto mixed = cli::load_scene(fs::path(DDFEM_SCENE_DIR) / "two_balls_mixed.json");
  options.field = "weight:Ball0";
  options.allow_coarse = false;
  const auto weights = cli::cmd_render(mixed, options);
  const auto nearest = [&](const Point& x) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < weights.points.size(); ++k) {
      if ((weights.points[k] - x).squaredNorm() < (weights.points[best] - x).squaredNorm()) best = k;
    }
    return weights.values[best];
  };
  double low_on_ball0 = 1.0;
  double high_on_ball1 = 0.0;
  for (double deg : {120.0, 150.0, 180.0, 210.0, 240.0}) {
    const double a = deg * M_PI / 180.0;
    low_on_ball0 = std::min(low_on_ball0, nearest(p2(-0.5 + std::cos(a), std::sin(a))));
    high_on_ball1 = std::max(high_on_ball1, nearest(p2(0.5 - std::cos(a), std::sin(a))));
  }
  const bool split = low_on_ball0 > 0.9 && high_on_ball1 < 0.1;
  return {topology && split,
          fmt("crossings x=0: %zu, y=0: %zu, y=0.5: %zu; min w0 on Ball0 arc %.3f, max w0 on Ball1 arc %.1e",
              vertical.size(), horizontal.size(), upper.size(), low_on_ball0, high_on_ball1)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 geometry oracle", geometry_oracle},
      {"2 phase-field identities", phase_field_identities},
      {"3 partition of unity", partition_of_unity},
      {"4 poisson convergence", poisson_convergence},
      {"5 interior consistency", interior_consistency},
      {"6 neumann mass conservation", neumann_mass},
      {"7 mixed boundary locality", mixed_locality},
      {"8 composition table", composition_table},
      {"9 figure renders", figure_renders},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.passed;
    std::printf("%s criterion %s: %s\n", outcome.passed ? "PASS" : "FAIL", c.name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
