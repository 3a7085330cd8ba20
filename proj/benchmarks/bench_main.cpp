/*
 * Copyright 2026 The cirl authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "cirl/experiments.hpp"
#include "cirl/forward.hpp"
#include "cirl/irl.hpp"
#include "cirl/numerics.hpp"
#include "cirl/occupancy.hpp"

#include <random>

namespace {

using namespace cirl;

const Cmdp& gridworld() {
    static const Cmdp cmdp = build_gridworld(GridworldConfig{});
    return cmdp;
}

void BM_SoftValueIteration(benchmark::State& state) {
    const Cmdp& cmdp = gridworld();
    for (auto _ : state) {
        benchmark::DoNotOptimize(soft_value_iteration(cmdp, *cmdp.reward, 1.0, 1e-8));
    }
}
BENCHMARK(BM_SoftValueIteration)->Unit(benchmark::kMillisecond);

void BM_ConstrainedSolve(benchmark::State& state) {
    const Cmdp& cmdp = gridworld();
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_rl_constrained(cmdp, *cmdp.reward, 1.0, 1e-8));
    }
}
BENCHMARK(BM_ConstrainedSolve)->Unit(benchmark::kMillisecond);

void BM_OccupancyFromPolicy(benchmark::State& state) {
    const Cmdp& cmdp = gridworld();
    const Policy uniform = Policy::uniform(cmdp.n, cmdp.m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(occupancy_from_policy(cmdp, uniform));
    }
}
BENCHMARK(BM_OccupancyFromPolicy);

void BM_GdaEpisode(benchmark::State& state) {
    // One NPG step plus the exact occupancy evaluation, the inner loop of the
    // descent-ascent algorithm.
    const Cmdp& cmdp = gridworld();
    Policy policy = Policy::uniform(cmdp.n, cmdp.m);
    const double eta = (1.0 - cmdp.gamma) / 1.0;
    for (auto _ : state) {
        policy = npg_step(cmdp, policy, *cmdp.reward, 1.0, eta);
        benchmark::DoNotOptimize(occupancy_from_policy(cmdp, policy));
    }
}
BENCHMARK(BM_GdaEpisode);

void BM_SlaterCheck(benchmark::State& state) {
    const Cmdp& cmdp = gridworld();
    for (auto _ : state) {
        benchmark::DoNotOptimize(slater_check(cmdp));
    }
}
BENCHMARK(BM_SlaterCheck)->Unit(benchmark::kMillisecond);

void BM_ProjectL1Ball(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Vector w(state.range(0));
    for (Index i = 0; i < w.size(); ++i) w[i] = unif(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_l1_ball(w, 1.0));
    }
}
BENCHMARK(BM_ProjectL1Ball)->Arg(64)->Arg(1024)->Arg(16384);

void BM_SampleDemonstrations(benchmark::State& state) {
    const Cmdp& cmdp = gridworld();
    const Policy uniform = Policy::uniform(cmdp.n, cmdp.m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sample_demonstrations(cmdp, uniform, static_cast<int>(state.range(0)), 100, 7));
    }
}
BENCHMARK(BM_SampleDemonstrations)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
