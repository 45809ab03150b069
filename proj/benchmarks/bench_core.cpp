// SPDX-License-Identifier: Apache-2.0
//
// capa-sense: CRB-optimal probing-current design for continuous-aperture
// near-field sensing
// Copyright (C) 2026 The capa-sense Authors
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

#include "capa/fisher.hpp"
#include "capa/optimizer.hpp"
#include "capa/quadrature.hpp"

#include <benchmark/benchmark.h>

namespace
{
    void BM_LegendreRule(benchmark::State &state)
    {
        for (auto _ : state)
            benchmark::DoNotOptimize(capa::legendre_rule(static_cast<int>(state.range(0))));
    }
    BENCHMARK(BM_LegendreRule)->Arg(20)->Arg(120)->Arg(300);

    void BM_BuildModel(benchmark::State &state)
    {
        const capa::Scenario s = capa::reference_scenario();
        for (auto _ : state)
            benchmark::DoNotOptimize(capa::SensingModel::build(s, static_cast<int>(state.range(0))));
    }
    BENCHMARK(BM_BuildModel)->Arg(40)->Arg(120)->Arg(300)->Unit(benchmark::kMillisecond);

    const capa::SensingModel &model120()
    {
        static const capa::SensingModel m = capa::SensingModel::build(capa::reference_scenario(), 120);
        return m;
    }

    void BM_Objective(benchmark::State &state)
    {
        const auto &m = model120();
        const capa::CVector w = capa::random_feasible_w(m.B0(), m.scenario().power_budget_A2, 7);
        for (auto _ : state)
            benchmark::DoNotOptimize(m.objective(w));
    }
    BENCHMARK(BM_Objective);

    void BM_Gradient(benchmark::State &state)
    {
        const auto &m = model120();
        const capa::CVector w = capa::random_feasible_w(m.B0(), m.scenario().power_budget_A2, 7);
        for (auto _ : state)
            benchmark::DoNotOptimize(m.gradient(w));
    }
    BENCHMARK(BM_Gradient);

    void BM_Smgd(benchmark::State &state)
    {
        const auto &m = model120();
        capa::SmgdConfig cfg;
        std::uint64_t seed = 1;
        for (auto _ : state)
            benchmark::DoNotOptimize(capa::smgd(m, cfg, seed++));
    }
    BENCHMARK(BM_Smgd)->Unit(benchmark::kMillisecond);
} // namespace

BENCHMARK_MAIN();
