#include "orcd/runner.hpp"

#include <atomic>
#include <functional>
#include <thread>

namespace orcd {

MetricsLog run_single(const ScenarioConfig& config, std::uint64_t seed) {
    Topology topology = build_topology(config.topology);
    Simulator sim(std::move(topology), config.policy, config.policy_m, config.sim, config.mac,
                  config.control, config.estimator, seed);
    sim.run();
    return sim.metrics();
}

ResultRow summarize(const ScenarioConfig& config, std::uint64_t seed, const MetricsLog& metrics,
                    const std::string& param_label) {
    ResultRow row;
    row.scenario_hash = scenario_hash(config);
    row.seed = seed;
    row.policy = std::string(to_string(config.policy));
    row.param = param_label;
    row.mean_delay_slots = metrics.mean_delay();
    row.p50 = metrics.delay_percentile(0.50);
    row.p95 = metrics.delay_percentile(0.95);
    row.delivered = metrics.cohort_delivered;
    row.drop_buffer = metrics.cohort_drop_buffer;
    row.drop_ttl = metrics.cohort_drop_ttl;
    row.drop_retry = metrics.cohort_drop_retry;
    row.drop_fo = metrics.post_warmup_fo_losses();
    row.overhead_us = metrics.post_warmup_overhead_us();
    return row;
}

namespace {

void run_pool(std::size_t points, int jobs, const std::function<void(std::size_t)>& work) {
    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<std::size_t>(workers, points);
    if (workers <= 1) {
        for (std::size_t p = 0; p < points; ++p) work(p);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t p = next.fetch_add(1); p < points; p = next.fetch_add(1)) work(p);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<SeedRun> run_seeds(const ScenarioConfig& config, int jobs) {
    std::vector<SeedRun> runs(config.seeds.size());
    run_pool(config.seeds.size(), jobs, [&](std::size_t p) {
        runs[p].seed = config.seeds[p];
        runs[p].metrics = run_single(config, config.seeds[p]);
    });
    return runs;
}

std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepSpec& sweep, int jobs) {
    struct Point {
        ScenarioConfig config;
        std::uint64_t seed;
        std::string label;
    };
    std::vector<Point> points;
    for (double value : sweep.values) {
        ScenarioConfig at_value = apply_sweep_value(config, sweep.param, value);
        const std::string label = to_string(sweep.param) + "=" + format_double(value);
        for (std::uint64_t seed : at_value.seeds) points.push_back({at_value, seed, label});
    }
    std::vector<ResultRow> rows(points.size());
    run_pool(points.size(), jobs, [&](std::size_t p) {
        const MetricsLog metrics = run_single(points[p].config, points[p].seed);
        rows[p] = summarize(points[p].config, points[p].seed, metrics, points[p].label);
    });
    return rows;
}

}  // namespace orcd
