#include <vector>

#include <benchmark/benchmark.h>

#include "cdnarms/ars.hpp"
#include "cdnarms/inference.hpp"
#include "cdnarms/saem.hpp"
#include "cdnarms/simulate.hpp"

namespace {

using namespace cdnarms;

SimulationResult data(const SwitchingModel& model, Index length) {
  SimulationOptions o;
  o.historyLength = 24;
  return simulate(model, length, 7, o);
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto model = state.range(1) == 2 ? presets::ghilTwoLayer() : presets::ghilThreeLayer();
  const auto sim = data(model, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forwardBackward(model, sim.series).logLik);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Args({250, 2})->Args({1000, 2})->Args({1000, 3});

void BM_ProfileSolve(benchmark::State& state) {
  const auto model = presets::ghilTwoLayerFractional();
  const auto sim = data(model, state.range(0));
  const auto post = eStep(model, sim.series);
  const Eigen::VectorXd col = post.gamma.col(0);
  const std::vector<double> w(col.data(), col.data() + col.size());
  LayerProfile profile(sim.series, model.step, w, {true, true}, 1e-6);
  auto layer = model.layers[0];
  double kappa = layer.param("kappa");
  for (auto _ : state) {
    // A new nonlinear value each round, as in a coordinate search.
    kappa = kappa > 4.0 ? 2.0 : kappa + 1e-3;
    layer.setParam("kappa", kappa);
    benchmark::DoNotOptimize(profile.solve(layer).value);
  }
}
BENCHMARK(BM_ProfileSolve)->Arg(250)->Arg(1000);

void BM_SaemIteration(benchmark::State& state) {
  const auto model = presets::ghilTwoLayer();
  const auto sim = data(model, state.range(0));
  const auto post = eStep(model, sim.series);
  const auto partition = defaultPartition(model);
  CoordOptions options;
  options.integerDelays = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saemIteration(model, sim.series, post, partition, options));
  }
}
BENCHMARK(BM_SaemIteration)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);

void BM_Ars(benchmark::State& state) {
  const Interval box[] = {{0.0, 10.0}};
  const auto config = ArsConfig::forBox(box);
  auto f = [](std::span<const double> b) { return -(b[0] - 3.0) * (b[0] - 3.0); };
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(maximize(f, box, {9.0}, config, seed++).value);
}
BENCHMARK(BM_Ars);

}  // namespace

BENCHMARK_MAIN();
