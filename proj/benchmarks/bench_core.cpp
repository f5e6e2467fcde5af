#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pinchloc/analysis.hpp"
#include "pinchloc/crlb.hpp"
#include "pinchloc/estimator.hpp"
#include "pinchloc/experiments.hpp"

using namespace pinchloc;

namespace {

const ReferenceSetup kReference = default_paper_config();

void BM_SampleDeployment(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_deployment(kReference.config, rng));
}
BENCHMARK(BM_SampleDeployment);

void BM_Localizability(benchmark::State& state) {
  const LocalizabilityQuery q{static_cast<int>(state.range(0)), 0.01, kReference.config, kReference.params, {}};
  for (auto _ : state) benchmark::DoNotOptimize(localizability(q));
}
BENCHMARK(BM_Localizability)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FimCrlb(benchmark::State& state) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::vector<Point2> anchors(static_cast<std::size_t>(state.range(0)));
  for (auto& a : anchors) a = {u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(crlb_exact(fim_rss(anchors, {0.1, 0.2}, 1.0)));
}
BENCHMARK(BM_FimCrlb)->Arg(5)->Arg(40);

void BM_MleLocate(benchmark::State& state) {
  Rng rng(3);
  std::vector<Point2> anchors{{12.0, 3.0}, {-7.0, 9.0}, {-4.0, -14.0}, {20.0, -6.0}, {1.0, 25.0}};
  EstimationProblem problem;
  problem.anchors = anchors;
  problem.sigma_p_sq = 0.1;
  for (const Point2& a : anchors) problem.samples.push_back(rss_sample(distance(a, {0.0, 0.0}), 2.1, 0.3, rng));
  for (auto _ : state) benchmark::DoNotOptimize(mle_locate(problem));
}
BENCHMARK(BM_MleLocate)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
