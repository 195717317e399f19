// Serial reference vs OpenMP kernel timings. Run with --benchmark_filter=<name> to narrow.

#include <benchmark/benchmark.h>

#include "sigexec/backtest.hpp"
#include "sigexec/expsig.hpp"
#include "sigexec/market.hpp"
#include "sigexec/problem.hpp"

namespace {

using namespace sigexec;

ModelParams bm_model(int steps) {
    ModelParams p;
    p.sigma = 0.02;
    p.steps = steps;
    return p;
}

ProblemSpec spec_for(int m) {
    ProblemSpec s;
    s.alpha = 10.0;
    s.phi = 1e-3;
    s.impact = ImpactModel::temporary_plus_permanent(1e-3, 1e-4);
    s.level_l = m;
    s.level_es = 2 * m + 3;
    return s;
}

const PathBatch& batch() {
    static const PathBatch b = simulate(bm_model(250), 2000, 1);
    return b;
}

void BM_Simulate(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    for (auto _ : st) {
        auto b = parallel ? simulate(bm_model(250), 2000, 7) : simulate_serial(bm_model(250), 2000, 7);
        benchmark::DoNotOptimize(b.paths.data());
    }
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_BatchSignatures(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    for (auto _ : st) {
        auto s = parallel ? batch_signatures(batch().paths, 7) : batch_signatures_serial(batch().paths, 7);
        benchmark::DoNotOptimize(s.data());
    }
}
BENCHMARK(BM_BatchSignatures)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    for (auto _ : st) {
        auto es = parallel ? estimate(batch(), 7) : estimate_serial(batch(), 7);
        benchmark::DoNotOptimize(es.n_samples());
    }
}
BENCHMARK(BM_Estimate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_AssembleQuadratic(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    const int m = 3;
    const auto spec = spec_for(m);
    const auto es = fawcett_bm_oracle(1.0, spec.level_es, 0.02);
    const auto basis = word_basis(2, m);
    for (auto _ : st) {
        auto f = parallel ? assemble_quadratic(spec, es, basis) : assemble_quadratic_serial(spec, es, basis);
        benchmark::DoNotOptimize(f.A.data());
    }
}
BENCHMARK(BM_AssembleQuadratic)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_RunStrategy(benchmark::State& st) {
    const bool parallel = st.range(0) != 0;
    const auto spec = spec_for(2);
    Strategy s;
    for (const auto& w : word_basis(2, 2)) s.speed.add_term(w, 0.1);
    for (auto _ : st) {
        auto r = parallel ? run_strategy(s, batch(), spec) : run_strategy_serial(s, batch(), spec);
        benchmark::DoNotOptimize(r.cost.mean);
    }
}
BENCHMARK(BM_RunStrategy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
