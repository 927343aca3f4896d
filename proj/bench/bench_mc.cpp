// Serial reference vs OpenMP Monte-Carlo risk.  Both produce bitwise-equal
// estimates; the benchmark only measures throughput.

#include "bregcr/risk.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace bregcr;

namespace {

struct Setup {
    Generator gen;
    Prior prior;
    Channel ch;
    EstimatorSpec est;
};

Setup poisson() {
    const Generator g = Generator::neg_entropy();
    return {g, GammaPrior{2.1, 3.0}, PoissonChannel{5.0},
            EstimatorSpec::posterior_mean(PosteriorMode::closed_form, interior_clamp(g))};
}

Setup binomial() {
    const Generator g = Generator::binary_logit();
    return {g, BetaPrior{3.0, 5.0}, BinomialChannel{20, 1.0},
            EstimatorSpec::posterior_mean(PosteriorMode::closed_form, interior_clamp(g))};
}

template <Setup (*Make)()>
void BM_serial(benchmark::State& state) {
    const Setup s = Make();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_risk_serial(s.gen, s.prior, s.ch, s.est, n, 42).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Setup (*Make)()>
void BM_parallel(benchmark::State& state) {
    const Setup s = Make();
    const auto n = static_cast<std::size_t>(state.range(0));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_risk(s.gen, s.prior, s.ch, s.est, n, 42).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = static_cast<double>(state.range(1));
}

}  // namespace

BENCHMARK(BM_serial<poisson>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel<poisson>)->ArgsProduct({{100000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_serial<binomial>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel<binomial>)->ArgsProduct({{100000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
