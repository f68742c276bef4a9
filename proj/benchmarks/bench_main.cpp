#include <benchmark/benchmark.h>

#include <memory>

#include "ddfem/fem/assembly.hpp"
#include "ddfem/fem/solvers.hpp"
#include "ddfem/geometry/domain.hpp"
#include "ddfem/model/problems.hpp"
#include "ddfem/model/weak_form.hpp"
#include "ddfem/transform/transform.hpp"

using namespace ddfem;

namespace {

Point p2(double x, double y) { return make_point({x, y}); }

geometry::Sdf five_balls() {
  using namespace geometry;
  auto center = ball(1.0, p2(0, 0), "Center");
  auto core = (center - ball(0.5, p2(0, 0.8), "TopCut") - ball(0.5, p2(0, -0.8), "BotCut")) |
              ball(0.5, p2(1, 0), "RightAdd") | ball(0.5, p2(-1, 0), "LeftAdd");
  return named(core & ball(1.4, p2(0, 0), "Cutoff"), "full");
}

struct PoissonSetup {
  std::shared_ptr<const geometry::DomainGeometry> domain;
  fem::MeshPtr mesh;
  std::unique_ptr<fem::Assembler> assembler;
};

PoissonSetup poisson(double eps) {
  auto root = geometry::ball(1.0, p2(0, 0), "Omega");
  root->set_epsilon(eps);
  PoissonSetup s;
  s.domain = std::make_shared<const geometry::DomainGeometry>(root);
  auto problem = model::make_problem("poisson", 2);
  problem.boundary.add("Omega", boundary::DirichletValue{[](double, const Point&) { return make_state({0.0}); }});
  problem.out_factor_implicit = 1.0;
  const auto transformed = transform::ddm1_transform(problem, s.domain);
  const int n = static_cast<int>(3.0 / (eps / 2.0));
  s.mesh = fem::filter_cells(*fem::build_mesh(p2(-1.5, -1.5), p2(1.5, 1.5), n), *root);
  s.assembler = std::make_unique<fem::Assembler>(model::model_to_weak_form(transformed.model), s.mesh);
  return s;
}

void BM_SdfFiveBalls(benchmark::State& state) {
  const auto root = five_balls();
  double x = -1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(root->value(p2(x, 0.3)));
    x = x > 1.5 ? -1.5 : x + 1e-3;
  }
}
BENCHMARK(BM_SdfFiveBalls);

void BM_AssemblePoisson(benchmark::State& state) {
  const auto s = poisson(0.1 / static_cast<double>(state.range(0)));
  const Eigen::VectorXd U = Eigen::VectorXd::Zero(s.assembler->num_dofs());
  for (auto _ : state) benchmark::DoNotOptimize(s.assembler->assemble(U, 0.0));
  state.counters["dofs"] = s.assembler->num_dofs();
}
BENCHMARK(BM_AssemblePoisson)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SolvePoisson(benchmark::State& state) {
  const auto s = poisson(0.1 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fem::solve_newton(*s.assembler, fem::DiscreteField(s.mesh, 1), 0.0));
  }
  state.counters["dofs"] = s.assembler->num_dofs();
}
BENCHMARK(BM_SolvePoisson)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
