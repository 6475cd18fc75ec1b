#pragma once

#include <memory>
#include <string>
#include <vector>

#include "orcd/csv.hpp"
#include "orcd/scenario.hpp"
#include "orcd/sim.hpp"

namespace orcd {

/// Builds and runs one scenario point for one seed.
MetricsLog run_single(const ScenarioConfig& config, std::uint64_t seed);

ResultRow summarize(const ScenarioConfig& config, std::uint64_t seed, const MetricsLog& metrics,
                    const std::string& param_label);

struct SeedRun {
    std::uint64_t seed = 0;
    MetricsLog metrics;
};

/// Runs every seed of the config on a worker pool (0 jobs = hardware
/// concurrency). Output order follows the seed list regardless of completion
/// order, keeping emitted CSVs deterministic.
std::vector<SeedRun> run_seeds(const ScenarioConfig& config, int jobs = 0);

/// Cross product of sweep values and seeds, one row per (value, seed).
std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepSpec& sweep,
                                 int jobs = 0);

}  // namespace orcd
