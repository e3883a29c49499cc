// Element-level costs: basis evaluation, raw quadrature stiffness and the
// projected stiffness, plus one full assembly.

#include "polyproj/assembly.hpp"
#include "polyproj/harness.hpp"
#include "polyproj/projection.hpp"

#include <benchmark/benchmark.h>

using namespace polyproj;

namespace {

const Polygon& pentagon() {
  static const Polygon p = reference_cell_polygons()[0];
  return p;
}

void BM_WachspressEvaluate(benchmark::State& state) {
  const Polygon hex = registry_polygon("hex");
  const Point x(0.1, -0.2);
  Eigen::VectorXd v;
  Gradients g;
  for (auto _ : state) {
    wachspress_values_gradients(hex, x, v, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_WachspressEvaluate);

void BM_SerendipityEvaluate(benchmark::State& state) {
  const ElementBasis b = ElementBasis::serendipity(registry_polygon("hex"));
  const Point x(0.1, -0.2);
  Eigen::VectorXd v;
  Gradients g;
  for (auto _ : state) {
    b.evaluate(x, v, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_SerendipityEvaluate);

void BM_SerendipityBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ElementBasis::serendipity(pentagon()).coefficients().data());
}
BENCHMARK(BM_SerendipityBuild);

// Args: element order, quadrature order.
void BM_StiffnessQuadrature(benchmark::State& state) {
  const ElementBasis b = ElementBasis::make(pentagon(), static_cast<int>(state.range(0)));
  const QuadratureRule r = rule_on_polygon(pentagon(), Scheme::Quadrangulation, static_cast<int>(state.range(1)));
  const DiffusionTensor k = DiffusionTensor::identity();
  for (auto _ : state) benchmark::DoNotOptimize(element_stiffness_quadrature(b, k, r).data());
}
BENCHMARK(BM_StiffnessQuadrature)->Args({1, 1})->Args({1, 32})->Args({2, 2})->Args({2, 32});

void BM_StiffnessProjected(benchmark::State& state) {
  const ElementBasis b = ElementBasis::make(pentagon(), static_cast<int>(state.range(0)));
  const PolyBasis poly(b);
  const QuadratureRule r = rule_on_polygon(pentagon(), Scheme::Quadrangulation, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(element_stiffness_projected(b, poly, Eigen::Matrix2d::Identity(), r).K_elem.data());
  }
}
BENCHMARK(BM_StiffnessProjected)->Args({1, 1})->Args({2, 2});

void BM_Assemble(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  PolygonalMesh mesh = build_reference_mesh(5);
  if (m == 2) mesh = add_midside_nodes(mesh);
  const Discretization d{m, FormMode::Projected, Scheme::Quadrangulation, m, 1};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mesh, d, DiffusionTensor::identity()).nonZeros());
  state.counters["elements"] = mesh.num_elements();
}
BENCHMARK(BM_Assemble)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
