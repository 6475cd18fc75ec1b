#pragma once

#include <cstdint>
#include <vector>

#include "orcd/rng.hpp"
#include "orcd/topology.hpp"

namespace orcd {

struct EstimatorConfig {
    bool enabled = false;
    double alpha = 0.5;          // weight on the active-probe ratio
    double passive_ewma = 0.3;   // per-window EWMA factor for passive ratios
    int window_slots = 500;
    int probes_per_window = 10;
};

/// Combines periodic active probing with passive overhearing of data/ACK
/// traffic: p_hat = alpha * probe ratio + (1 - alpha) * passive EWMA.
/// Windows without observations hold the previous estimate.
class LinkEstimator {
  public:
    LinkEstimator() = default;
    LinkEstimator(int node_count, EstimatorConfig config);

    void record_probe(NodeId i, NodeId j, bool heard);
    void record_passive(NodeId i, NodeId j, bool heard);

    /// Closes the estimation window and folds accumulated counts into the
    /// estimates.
    void roll_window();

    /// Current estimate; falls back to `fallback` while nothing was observed.
    double estimate(NodeId i, NodeId j, double fallback) const;

  private:
    struct Cell {
        std::uint32_t probe_heard = 0, probe_sent = 0;
        std::uint32_t passive_heard = 0, passive_sent = 0;
        double active_ratio = -1.0;  // < 0: never observed
        double passive_avg = -1.0;
        double combined = -1.0;
    };

    std::size_t index(NodeId i, NodeId j) const {
        return static_cast<std::size_t>(i) * (n_ + 1) + static_cast<std::size_t>(j);
    }

    int n_ = 0;
    EstimatorConfig config_;
    std::vector<Cell> cells_;
};

}  // namespace orcd
