#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "heatctrl/kernels.hpp"

namespace k = heatctrl::kernels;

namespace {

std::vector<double> squares(int modes) {
    std::vector<double> r(modes);
    for (int n = 0; n < modes; ++n) r[n] = std::pow((n + 0.3) * 3.14159, 2);
    return r;
}

std::vector<double> noise(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

template <bool Parallel>
void apply(benchmark::State& state) {
    const int modes = static_cast<int>(state.range(0)), cells = static_cast<int>(state.range(1));
    const auto m = k::serial::cell_exponentials(squares(modes), 1.0, cells);
    const auto u = noise(cells, 1);
    std::vector<double> out(modes);
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::apply(m, u, out);
        else k::serial::apply(m, u, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void apply_transpose(benchmark::State& state) {
    const int modes = static_cast<int>(state.range(0)), cells = static_cast<int>(state.range(1));
    const auto m = k::serial::cell_exponentials(squares(modes), 1.0, cells);
    const auto c = noise(modes, 2);
    std::vector<double> out(cells);
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::apply_transpose(m, c, out);
        else k::serial::apply_transpose(m, c, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void sample_series(benchmark::State& state) {
    const int modes = static_cast<int>(state.range(0)), samples = static_cast<int>(state.range(1));
    const auto rho_sq = squares(modes);
    const auto c = noise(modes, 3);
    std::vector<double> times(samples), out(samples);
    for (int i = 0; i < samples; ++i) times[i] = i / static_cast<double>(samples);
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::sample_series(c, rho_sq, 1.0, times, 0, out);
        else k::serial::sample_series(c, rho_sq, 1.0, times, 0, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void three_level(benchmark::State& state) {
    const int cells = static_cast<int>(state.range(0)), modes = 64;
    const auto m = k::serial::cell_exponentials(squares(modes), 1.0, cells);
    const auto target = noise(modes, 4);
    const std::vector<double> offset(modes, 0.0), norms(modes, 0.5);
    k::ThreeLevelProblem p{&m, offset, target, norms, -1.0, 1.0, 1.0 / cells, 0.0, 0.02};
    for (auto _ : state) {
        auto best = Parallel ? k::omp::three_level_search(p) : k::serial::three_level_search(p);
        benchmark::DoNotOptimize(best);
    }
}

}  // namespace

BENCHMARK(apply<false>)->Args({64, 256})->Args({512, 4096})->Name("apply/serial");
BENCHMARK(apply<true>)->Args({64, 256})->Args({512, 4096})->Name("apply/omp")->UseRealTime();
BENCHMARK(apply_transpose<false>)->Args({64, 256})->Args({512, 4096})->Name("apply_transpose/serial");
BENCHMARK(apply_transpose<true>)->Args({64, 256})->Args({512, 4096})->Name("apply_transpose/omp")->UseRealTime();
BENCHMARK(sample_series<false>)->Args({64, 4096})->Args({512, 16384})->Name("sample_series/serial");
BENCHMARK(sample_series<true>)->Args({64, 4096})->Args({512, 16384})->Name("sample_series/omp")->UseRealTime();
BENCHMARK(three_level<false>)->Arg(6)->Arg(8)->Name("three_level_search/serial");
BENCHMARK(three_level<true>)->Arg(6)->Arg(8)->Name("three_level_search/omp")->UseRealTime();

BENCHMARK_MAIN();
