#include "orcd/link_estimator.hpp"

namespace orcd {

LinkEstimator::LinkEstimator(int node_count, EstimatorConfig config)
    : n_(node_count), config_(config), cells_((node_count + 1) * (node_count + 1)) {}

void LinkEstimator::record_probe(NodeId i, NodeId j, bool heard) {
    Cell& c = cells_[index(i, j)];
    c.probe_sent += 1;
    c.probe_heard += heard ? 1 : 0;
}

void LinkEstimator::record_passive(NodeId i, NodeId j, bool heard) {
    Cell& c = cells_[index(i, j)];
    c.passive_sent += 1;
    c.passive_heard += heard ? 1 : 0;
}

void LinkEstimator::roll_window() {
    for (Cell& c : cells_) {
        const bool any = c.probe_sent > 0 || c.passive_sent > 0;
        if (!any) continue;  // hold previous estimates
        if (c.probe_sent > 0)
            c.active_ratio = static_cast<double>(c.probe_heard) / c.probe_sent;
        if (c.passive_sent > 0) {
            const double ratio = static_cast<double>(c.passive_heard) / c.passive_sent;
            c.passive_avg = c.passive_avg < 0.0
                                ? ratio
                                : config_.passive_ewma * ratio + (1.0 - config_.passive_ewma) * c.passive_avg;
        }
        c.probe_sent = c.probe_heard = 0;
        c.passive_sent = c.passive_heard = 0;

        if (c.active_ratio >= 0.0 && c.passive_avg >= 0.0)
            c.combined = config_.alpha * c.active_ratio + (1.0 - config_.alpha) * c.passive_avg;
        else if (c.active_ratio >= 0.0)
            c.combined = c.active_ratio;
        else if (c.passive_avg >= 0.0)
            c.combined = c.passive_avg;
    }
}

double LinkEstimator::estimate(NodeId i, NodeId j, double fallback) const {
    const Cell& c = cells_[index(i, j)];
    return c.combined >= 0.0 ? c.combined : fallback;
}

}  // namespace orcd
