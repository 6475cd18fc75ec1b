#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "orcd/analysis.hpp"
#include "orcd/sim.hpp"

namespace orcd {

/// Stable shortest-roundtrip formatting so that identical runs emit identical
/// bytes.
std::string format_double(double v);

/// One row of results.csv. Column order is part of the output contract:
/// scenario_hash,seed,policy,param,mean_delay_slots,p50,p95,delivered,
/// drop_buffer,drop_ttl,drop_retry,drop_fo,overhead_us
struct ResultRow {
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::string policy;
    std::string param;
    double mean_delay_slots = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    std::uint64_t delivered = 0;
    std::uint64_t drop_buffer = 0;
    std::uint64_t drop_ttl = 0;
    std::uint64_t drop_retry = 0;
    std::uint64_t drop_fo = 0;
    double overhead_us = 0.0;
};

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows);
std::string results_csv_string(std::span<const ResultRow> rows);

/// backlog.csv: slot,node,queue_len (one run).
void write_backlog_csv(std::ostream& os, const MetricsLog& metrics, int node_count);

/// drift.csv: bin_center,mean_drift,count.
void write_drift_csv(std::ostream& os, const DriftEstimate& estimate);

/// stability.csv: scenario_hash,seed,bounded,slope,mean_q3,mean_q4.
struct StabilityRow {
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    StabilityVerdict verdict;
};
void write_stability_csv(std::ostream& os, std::span<const StabilityRow> rows);

}  // namespace orcd
