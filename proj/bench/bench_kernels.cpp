// SPDX-License-Identifier: Apache-2.0
//
// uvchan: multi-UAV to multi-vehicle radio channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Serial reference against the OpenMP kernels: transfer function over a wide grid and the seed pool.

#include "uvchan/simulate.hpp"
#include "uvchan/sweep.hpp"

#include <benchmark/benchmark.h>

namespace
{

using namespace uvchan;

cir::LinkCir busy_link()
{
    Scenario sc = default_scenario();
    sc.duration = 0.05;
    Simulator sim(sc, params::default_table());
    while (sim.has_next())
        sim.next();
    return sim.cir().at(0, 0);
}

void BM_TransferFunctionSerial(benchmark::State &state)
{
    const auto l = busy_link();
    const auto freq = cir::frequency_grid(28e9, 2e9, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(cir::transfer_function(l, freq, 1.35, 28e9));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TransferFunctionOmp(benchmark::State &state)
{
    const auto l = busy_link();
    const auto freq = cir::frequency_grid(28e9, 2e9, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(cir::transfer_function_omp(l, freq, 1.35, 28e9));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct SeedPool
{
    Scenario sc;
    sweep::Settings st;
    sweep::Layout lay;

    SeedPool()
    {
        sc = default_scenario();
        sc.duration = 0.2;
        st.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
        st.tacf_anchors = {0.0};
        st.tacf_max_lag = 0.01;
        st.dpsd_anchors = 1;
        st.dpsd_lags = 16;
        st.tsi_anchors = 10;
        st.tsi_span = 0.1;
        lay = sweep::make_layout(st, sc);
    }
};

void BM_SeedsSerial(benchmark::State &state)
{
    const SeedPool p;
    for (auto _ : state)
        benchmark::DoNotOptimize(sweep::run_seeds_serial(p.sc, params::default_table(), p.lay, p.st.seeds));
}

void BM_SeedsOmp(benchmark::State &state)
{
    const SeedPool p;
    for (auto _ : state)
        benchmark::DoNotOptimize(sweep::run_seeds_omp(p.sc, params::default_table(), p.lay, p.st.seeds));
}

} // namespace

BENCHMARK(BM_TransferFunctionSerial)->Arg(201)->Arg(4096);
BENCHMARK(BM_TransferFunctionOmp)->Arg(201)->Arg(4096);
BENCHMARK(BM_SeedsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeedsOmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
