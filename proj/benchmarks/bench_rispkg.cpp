// rispkg - RIS-aided physical-layer key generation simulator for multi-cell systems
// Copyright (C) 2026 rispkg developers
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

#include <benchmark/benchmark.h>

#include "rispkg/ao.hpp"
#include "rispkg/experiment.hpp"
#include "rispkg/key_pipeline.hpp"

namespace {

using namespace rispkg;

struct Fixture {
    ScenarioPreset pre;
    CovarianceSet covs;
    PrecoderSet precoders;
    PhaseVector phases;

    explicit Fixture(int n_elements, int cov_samples = 96) {
        pre = preset("two-cell");
        pre.config.ris_elements = n_elements;
        covs = estimate_covariances(pre.geometry, pre.fading, pre.config, cov_samples, 42);
        precoders = PrecoderSet::scaled_identity(pre.config);
        phases = PhaseVector::ones(pre.config.phase_dim());
    }
};

void BM_EstimateCovariances(benchmark::State& state) {
    ScenarioPreset pre = preset("two-cell");
    pre.config.ris_elements = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto covs = estimate_covariances(pre.geometry, pre.fading, pre.config, 64, 7);
        benchmark::DoNotOptimize(covs);
    }
}
BENCHMARK(BM_EstimateCovariances)->Arg(20)->Arg(40)->Arg(80);

void BM_KgrExact(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto rates = kgr_exact(f.pre.config, f.covs, f.precoders, f.phases);
        benchmark::DoNotOptimize(rates);
    }
}
BENCHMARK(BM_KgrExact)->Arg(20)->Arg(80);

void BM_AnalyticGradient(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    const Eigen::VectorXd w = f.pre.config.effective_weights();
    PhaseObjective objective(f.covs, f.precoders, w);
    for (auto _ : state) {
        auto g = objective.gradient(f.phases);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_AnalyticGradient)->Arg(20)->Arg(80);

void BM_KktIteration(benchmark::State& state) {
    Fixture f(40);
    const PrecoderSubproblem sub = build_subproblem(f.covs, f.phases, f.pre.config);
    std::vector<double> lambdas(static_cast<size_t>(f.pre.config.cells), 0.1);
    for (auto _ : state) {
        auto next = kkt_step(f.precoders, lambdas, sub);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_KktIteration);

void BM_ProbeRound(benchmark::State& state) {
    Fixture f(80);
    uint64_t seed = 0;
    for (auto _ : state) {
        auto real = sample_realization(f.pre.geometry, f.pre.fading, f.pre.config, ++seed);
        auto outcomes = probe_round(real, f.precoders, f.phases, seed);
        benchmark::DoNotOptimize(outcomes);
    }
}
BENCHMARK(BM_ProbeRound);

}  // namespace

BENCHMARK_MAIN();
