// Successor-hit scoring: serial reference against the OpenMP kernel.
#include "ptpdelay/detect/period.hpp"
#include "ptpdelay/sim/random.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace
{

// A 250-bin period buried in Bernoulli noise.
std::vector<std::int64_t> positions(std::int64_t end_bin, double noise)
{
    ptpdelay::Rng rng(42);
    std::vector<std::int64_t> out;
    for (std::int64_t b = 0; b < end_bin; ++b)
    {
        if (b % 250 == 7 || rng.bernoulli(noise))
        {
            out.push_back(b);
        }
    }
    return out;
}

void BM_serial(benchmark::State& state)
{
    const std::int64_t end = state.range(0);
    const auto pos = positions(end, 0.05);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(ptpdelay::detect::successor_hits_serial(pos, end, 2, 2000));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pos.size()));
}

void BM_parallel(benchmark::State& state)
{
    const std::int64_t end = state.range(0);
    const auto pos = positions(end, 0.05);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(ptpdelay::detect::successor_hits_parallel(pos, end, 2, 2000));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pos.size()));
}

} // namespace

BENCHMARK(BM_serial)->Arg(60'000)->Arg(600'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Arg(60'000)->Arg(600'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
