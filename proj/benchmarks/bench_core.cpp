#include <benchmark/benchmark.h>

#include <itolab/itolab.hpp>

#include <cmath>
#include <vector>

using namespace itolab;

namespace {

void BM_inverse_normal_cdf(benchmark::State& state) {
    double p = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(inverse_normal_cdf(p));
        p += 0.123456789;
        if (p >= 1.0) {
            p -= 1.0 - 1e-6;
        }
    }
}
BENCHMARK(BM_inverse_normal_cdf);

void BM_philox_normals(benchmark::State& state) {
    RandomStream stream({42, 7});
    for (auto _ : state) {
        benchmark::DoNotOptimize(stream.normal());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_philox_normals);

void BM_sample_path(benchmark::State& state) {
    const TimeGrid grid = make_uniform_grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_path(grid, 1, {1, i++}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sample_path)->Arg(256)->Arg(4096)->Arg(65536);

void BM_euler_maruyama_gbm(benchmark::State& state) {
    Coefficients gbm;
    gbm.drift = [](double, std::span<const double> x, std::span<double> b) { b[0] = 0.05 * x[0]; };
    gbm.dispersion = [](double, std::span<const double> x, std::span<double> s) { s[0] = 0.2 * x[0]; };
    gbm.name = "gbm";
    const SdeProblem prob{gbm, 0.0, {1.0}, 1.0};
    const TimeGrid grid = make_uniform_grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const BrownianPath path = sample_path(grid, 1, {3, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(euler_maruyama(prob, path));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_euler_maruyama_gbm)->Arg(256)->Arg(4096);

void BM_reduce(benchmark::State& state) {
    std::vector<double> samples(static_cast<std::size_t>(state.range(0)));
    RandomStream stream({9, 0});
    for (double& v : samples) {
        v = stream.normal();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduce(samples));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_reduce)->Arg(1 << 10)->Arg(1 << 20);

void BM_ito_integral_w_dw(benchmark::State& state) {
    const TimeGrid grid = make_uniform_grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const BrownianPath path = sample_path(grid, 1, {5, 0});
    const AdaptedProcess w = AdaptedProcess::brownian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(ito_integral(w, path).final_scalar());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ito_integral_w_dw)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
