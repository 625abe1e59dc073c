// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS.

#include <aspl/kernels.hpp>
#include <aspl/raster.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace aspl;

Image noise_image(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Image img(n, n);
    for (double& v : img.data()) {
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    return img;
}

struct GvfInputs {
    Image u, v, fx, fy, b;
    explicit GvfInputs(int n)
        : u(noise_image(n, 1)), v(noise_image(n, 2)), fx(noise_image(n, 3)), fy(noise_image(n, 4)), b(n, n) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            b.data()[i] = fx.data()[i] * fx.data()[i] + fy.data()[i] * fy.data()[i];
        }
    }
};

template <auto Fn>
void median(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)), 7);
    Image out;
    for (auto _ : state) {
        Fn(img, 5, 5, out);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

template <auto Fn>
void gvf_step(benchmark::State& state) {
    const GvfInputs in(static_cast<int>(state.range(0)));
    Image uo, vo;
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(in.u, in.v, in.fx, in.fy, in.b, 0.2, 0.2, uo, vo));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.u.size()));
}

template <auto Fn>
void gvf_energy(benchmark::State& state) {
    const GvfInputs in(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(in.u, in.v, in.fx, in.fy, in.b, 0.2));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.u.size()));
}

template <auto Fn>
void reduce(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)), 8);
    Image out;
    for (auto _ : state) {
        Fn(img, out);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

template <auto Fn>
void fill(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Ring ring;
    for (int k = 0; k < 512; ++k) {
        const double a = 2 * std::numbers::pi * k / 512;
        const double r = 0.35 * n * (1 + 0.2 * std::cos(5 * a));
        ring.push_back({n / 2.0 + r * std::cos(a), n / 2.0 + r * std::sin(a)});
    }
    const std::vector<Ring> rings{ring};
    BinaryMask mask(n, n);
    for (auto _ : state) {
        Fn(rings, mask);
        benchmark::DoNotOptimize(mask.bits().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

} // namespace

BENCHMARK(median<reference::median_filter>)->Name("median/reference")->Arg(256)->Arg(512);
BENCHMARK(median<kernels::median_filter>)->Name("median/omp")->Arg(256)->Arg(512);
BENCHMARK(gvf_step<reference::gvf_step>)->Name("gvf_step/reference")->Arg(256)->Arg(1024);
BENCHMARK(gvf_step<kernels::gvf_step>)->Name("gvf_step/omp")->Arg(256)->Arg(1024);
BENCHMARK(gvf_energy<reference::gvf_energy>)->Name("gvf_energy/reference")->Arg(256)->Arg(1024);
BENCHMARK(gvf_energy<kernels::gvf_energy>)->Name("gvf_energy/omp")->Arg(256)->Arg(1024);
BENCHMARK(reduce<reference::reduce>)->Name("reduce/reference")->Arg(256)->Arg(1024);
BENCHMARK(reduce<kernels::reduce>)->Name("reduce/omp")->Arg(256)->Arg(1024);
BENCHMARK(fill<reference::fill_rings>)->Name("fill/reference")->Arg(256)->Arg(1024);
BENCHMARK(fill<kernels::fill_rings>)->Name("fill/omp")->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
