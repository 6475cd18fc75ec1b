// Microbenchmarks for the hot paths: forwarder sampling, the congestion
// relaxation, fixed-point solves, simulation stepping and the stability
// oracle.

#include <benchmark/benchmark.h>

#include <vector>

#include "orcd/analysis.hpp"
#include "orcd/congestion.hpp"
#include "orcd/scenario.hpp"
#include "orcd/sim.hpp"

namespace {

using namespace orcd;

Topology dense_net(int n) {
    LinkMatrix m(n);
    RngStream rng(99);
    for (NodeId a = 1; a <= n; ++a)
        for (NodeId b = a + 1; b <= n; ++b)
            if (rng.bernoulli(0.6)) m.set_symmetric(a, b, 0.2 + 0.8 * rng.uniform01());
    for (NodeId a = 1; a < n; ++a)
        if (m(a, n) == 0.0) m.set_symmetric(a, n, 0.5);
    return Topology(m, {n});
}

void BM_SampleForwarderSet(benchmark::State& state) {
    const Topology t = dense_net(9);
    RngStream rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_forwarder_set(t, 1, rng));
}
BENCHMARK(BM_SampleForwarderSet);

void BM_UpdateCongestion(benchmark::State& state) {
    std::vector<Candidate> cands;
    RngStream rng(2);
    for (int k = 0; k < 8; ++k)
        cands.push_back({static_cast<NodeId>(k + 2), rng.uniform01() * 10.0,
                         0.1 + 0.9 * rng.uniform01()});
    for (auto _ : state) benchmark::DoNotOptimize(update_congestion(cands, 3.0, 0.0));
}
BENCHMARK(BM_UpdateCongestion);

void BM_PartialDiversityM4(benchmark::State& state) {
    std::vector<Candidate> cands;
    RngStream rng(3);
    for (int k = 0; k < 8; ++k)
        cands.push_back({static_cast<NodeId>(k + 2), rng.uniform01() * 10.0,
                         0.1 + 0.9 * rng.uniform01()});
    for (auto _ : state) benchmark::DoNotOptimize(partial_diversity_value(cands, 4, 3.0, 0.0));
}
BENCHMARK(BM_PartialDiversityM4);

void BM_SolveFixedPoint(benchmark::State& state) {
    const Topology t = dense_net(static_cast<int>(state.range(0)));
    std::vector<double> q(t.node_count() + 1, 2.0);
    q[0] = 0.0;
    q[t.node_count()] = 0.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            solve_fixed_point(t, q, CostVariant::kQueue, t.node_count()));
}
BENCHMARK(BM_SolveFixedPoint)->Arg(8)->Arg(16);

void BM_SimStepIdeal(benchmark::State& state) {
    CanonicalParams params;
    params.hole_size = 2;
    SimParams sp;
    sp.horizon = 1 << 30;
    sp.traffic = {{1, 5, 0.5, std::nullopt}};
    sp.record_node_backlog = false;
    ControlConfig control;
    control.ts_slots = 25;
    Simulator sim(generate_canonical(params), PolicyKind::kDorcd, 4, sp, {}, control, {}, 5);
    for (auto _ : state) sim.step();
}
BENCHMARK(BM_SimStepIdeal);

void BM_SimStepContention(benchmark::State& state) {
    GridParams grid;
    SimParams sp;
    sp.horizon = 1 << 30;
    sp.traffic = {{16, 1, 0.2, std::nullopt}, {4, 1, 0.2, std::nullopt}};
    sp.record_node_backlog = false;
    MacConfig mac;
    mac.mode = MacMode::kContentionTimed;
    ControlConfig control;
    control.ts_slots = 25;
    Simulator sim(generate_grid(grid), PolicyKind::kPdorcd, 4, sp, mac, control, {}, 5);
    for (auto _ : state) sim.step();
}
BENCHMARK(BM_SimStepContention);

void BM_StabilityOracle(benchmark::State& state) {
    LinkMatrix m(4);
    m.set_symmetric(1, 2, 0.5);
    m.set_symmetric(1, 3, 0.5);
    m.set_symmetric(2, 4, 1.0);
    m.set_symmetric(3, 4, 1.0);
    const Topology t(m, {4});
    std::vector<double> dir(5, 0.0);
    dir[1] = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(stability_region_max_rate(t, dir, 4, 1e-7));
}
BENCHMARK(BM_StabilityOracle);

}  // namespace

BENCHMARK_MAIN();
