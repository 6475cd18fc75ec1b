#include "orcd/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace orcd {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", v);
    return buffer;
}

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows) {
    os << "scenario_hash,seed,policy,param,mean_delay_slots,p50,p95,delivered,"
          "drop_buffer,drop_ttl,drop_retry,drop_fo,overhead_us\n";
    for (const auto& r : rows) {
        os << r.scenario_hash << ',' << r.seed << ',' << r.policy << ',' << r.param << ','
           << format_double(r.mean_delay_slots) << ',' << format_double(r.p50) << ','
           << format_double(r.p95) << ',' << r.delivered << ',' << r.drop_buffer << ','
           << r.drop_ttl << ',' << r.drop_retry << ',' << r.drop_fo << ','
           << format_double(r.overhead_us) << '\n';
    }
}

std::string results_csv_string(std::span<const ResultRow> rows) {
    std::ostringstream os;
    write_results_csv(os, rows);
    return os.str();
}

void write_backlog_csv(std::ostream& os, const MetricsLog& metrics, int node_count) {
    os << "slot,node,queue_len\n";
    const std::int64_t slots = static_cast<std::int64_t>(metrics.total_backlog.size());
    for (std::int64_t t = 0; t < slots; ++t)
        for (NodeId i = 1; i <= node_count; ++i)
            os << t << ',' << i << ',' << static_cast<std::uint32_t>(metrics.node_backlog_at(t, i))
               << '\n';
}

void write_drift_csv(std::ostream& os, const DriftEstimate& estimate) {
    os << "bin_center,mean_drift,count\n";
    for (const auto& bin : estimate.bins)
        os << format_double(bin.center) << ',' << format_double(bin.mean_drift) << ',' << bin.count
           << '\n';
}

void write_stability_csv(std::ostream& os, std::span<const StabilityRow> rows) {
    os << "scenario_hash,seed,bounded,slope,mean_q3,mean_q4\n";
    for (const auto& r : rows)
        os << r.scenario_hash << ',' << r.seed << ',' << (r.verdict.bounded ? 1 : 0) << ','
           << format_double(r.verdict.slope) << ',' << format_double(r.verdict.mean_q3) << ','
           << format_double(r.verdict.mean_q4) << '\n';
}

}  // namespace orcd
