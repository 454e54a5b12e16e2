// OpenMP kernels against their serial references, at snapshot-matrix sizes
// (100 grid points, one period at 1000 samples per time unit).

#include <random>

#include <benchmark/benchmark.h>

#include "kickrom/kernels.hpp"

using namespace kickrom;

namespace {

constexpr int kGrid = 100;
constexpr int kSamples = 3331;
constexpr int kModes = 11;

Eigen::MatrixXd random_matrix(int r, int c)
{
    std::mt19937 rng(42);
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

kernels::Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? kernels::Exec::Serial : kernels::Exec::Parallel;
}

void BM_WeightedCovariance(benchmark::State& state)
{
    const Eigen::MatrixXd X = random_matrix(kGrid, kSamples);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(kSamples);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::weighted_covariance(X, w, exec_of(state)));
    }
}

void BM_Synthesize(benchmark::State& state)
{
    const Eigen::MatrixXd S = random_matrix(kGrid, kModes);
    const Eigen::MatrixXd C = random_matrix(kModes, kSamples);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::synthesize(S, C, exec_of(state)));
    }
}

void BM_ColumnQuadratic(benchmark::State& state)
{
    const Eigen::MatrixXd C = random_matrix(kModes, kSamples);
    Eigen::MatrixXd G = random_matrix(kModes, kModes);
    G = G * G.transpose();
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::column_quadratic(C, G, exec_of(state)));
    }
}

}  // namespace

// Argument 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_WeightedCovariance)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Synthesize)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ColumnQuadratic)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
