// Serial reference versus OpenMP kernels on utilization- and
// ranking-sized inputs.

#include <benchmark/benchmark.h>

#include <random>

#include "cag/kernels.hpp"

using namespace cag::kernels;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0, 1);
    Matrix m{rows, cols, {}};
    m.data.reserve(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i) m.data.push_back(n(rng));
    return m;
}

std::vector<double> random_totals(std::size_t groups, std::size_t group_size) {
    std::mt19937 rng(3);
    std::vector<double> v(groups * group_size);
    for (auto& x : v) x = double(5 + rng() % 11);
    return v;
}

template <MaxPair (*Fn)(const Matrix&, const Matrix&)>
void BM_MaxCosine(benchmark::State& state) {
    const auto a = random_matrix(std::size_t(state.range(0)), 384, 1);
    const auto b = random_matrix(std::size_t(state.range(0)) * 8, 384, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * 8);
}

template <Matrix (*Fn)(const Matrix&, const Matrix&)>
void BM_CosineMatrix(benchmark::State& state) {
    const auto a = random_matrix(std::size_t(state.range(0)), 384, 1);
    const auto b = random_matrix(std::size_t(state.range(0)) * 8, 384, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * 8);
}

template <std::vector<double> (*Fn)(std::span<const double>, std::size_t)>
void BM_RankGroups(benchmark::State& state) {
    const auto v = random_totals(std::size_t(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(v, 5));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MaxCosine<serial::max_cosine>)->Name("max_cosine/serial")->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(BM_MaxCosine<parallel::max_cosine>)->Name("max_cosine/parallel")->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(BM_CosineMatrix<serial::cosine_matrix>)->Name("cosine_matrix/serial")->Arg(16)->Arg(64);
BENCHMARK(BM_CosineMatrix<parallel::cosine_matrix>)->Name("cosine_matrix/parallel")->Arg(16)->Arg(64);
BENCHMARK(BM_RankGroups<serial::rank_groups_desc>)->Name("rank_groups/serial")->Arg(300)->Arg(30000);
BENCHMARK(BM_RankGroups<parallel::rank_groups_desc>)->Name("rank_groups/parallel")->Arg(300)->Arg(30000);

BENCHMARK_MAIN();
