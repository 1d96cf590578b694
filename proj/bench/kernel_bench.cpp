// Serial vs OpenMP kernels at reservoir scale.

#include "reservoir/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace reservoir;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
    return m;
}

template <bool Parallel>
void euler_step(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Matrix w = random_matrix(n, n);
    const Vector x = random_matrix(n, 1);
    const Vector r = x.array().tanh().matrix();
    const Vector fb = random_matrix(n, 1);
    Vector out;
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::euler_step(x, r, w, fb, 0.3, 0.1, out);
        else kernels::serial::euler_step(x, r, w, fb, 0.3, 0.1, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void rank_one_downdate(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    Matrix p = Matrix::Identity(n, n);
    const Vector k = random_matrix(n, 1) * 1e-3;
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::rank_one_downdate(p, k, 1e-6);
        else kernels::serial::rank_one_downdate(p, k, 1e-6);
        benchmark::DoNotOptimize(p.data());
    }
}

template <bool Parallel>
void covariance(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Matrix h = random_matrix(500, n);
    Matrix out;
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::centered_covariance(h, out);
        else kernels::serial::centered_covariance(h, out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(euler_step<false>)->Arg(200)->Arg(1000);
BENCHMARK(euler_step<true>)->Arg(200)->Arg(1000);
BENCHMARK(rank_one_downdate<false>)->Arg(200)->Arg(1000);
BENCHMARK(rank_one_downdate<true>)->Arg(200)->Arg(1000);
BENCHMARK(covariance<false>)->Arg(200)->Arg(1000);
BENCHMARK(covariance<true>)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
