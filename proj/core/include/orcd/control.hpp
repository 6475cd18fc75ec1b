#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "orcd/congestion.hpp"
#include "orcd/rng.hpp"
#include "orcd/topology.hpp"

namespace orcd {

struct ControlConfig {
    int ts_slots = 500;     // control epoch period, in slots
    int tc_multiple = 1;    // computation cycle length, in epochs
    double loss_prob = 0.0; // Bernoulli loss per (control packet, receiver)
    bool poison_reverse = true;
    int expiry_epochs = 3;  // estimates older than this many epochs count as poisoned
    std::size_t max_forwarders = kUnboundedForwarders; // partial-diversity cap
};

/// Simulated wire format of one control packet, exposed for traces.
struct ControlPacket {
    NodeId sender = 0;
    NodeId commodity = 0;                                    // destination
    std::vector<std::pair<NodeId, std::uint64_t>> advertised; // per receiver, fixed 32.32
    std::uint64_t epoch = 0;
};

/// Per-node distributed state: the in-progress (virtual) congestion measures,
/// neighbor estimates with receipt epochs, cycle-averaged queues, and the
/// frozen (actual) tables that forwarding reads. The virtual table warm-starts
/// across cycles; the actual table is replaced atomically at every cycle
/// boundary.
class ControlPlane {
  public:
    ControlPlane(const Topology& topology, ControlConfig config, RngStream loss_rng);

    /// Replaces the link probabilities the calculus reads (the channel itself
    /// is untouched); used when link estimation feeds the routing tables.
    void set_link_provider(std::function<double(NodeId, NodeId)> provider);

    /// Runs one control epoch. `queue_len(i, d)` must return the current
    /// backlog of commodity d at node i. Cycle boundaries (every tc_multiple
    /// epochs, including epoch 0) refresh the queue averages, swap the actual
    /// table and recompute best-forwarder sets before the exchange.
    void run_epoch(const std::function<double(NodeId, NodeId)>& queue_len,
                   std::vector<ControlPacket>* trace = nullptr);

    /// Forces a cycle-boundary snapshot without running an exchange.
    void force_snapshot();

    std::uint64_t epoch() const { return epoch_; }

    // --- virtual (in-progress) table ---
    double virtual_value(NodeId i, NodeId dest) const;
    const std::vector<NodeId>& virtual_priority(NodeId i, NodeId dest) const;
    double virtual_success_prob(NodeId i, NodeId dest) const;

    // --- actual (forwarding) table, snapshot at the last cycle boundary ---
    double actual_value(NodeId i, NodeId dest) const;
    /// Estimate of neighbor k's measure as frozen at the snapshot; +inf if
    /// never received or expired at snapshot time.
    double actual_estimate(NodeId i, NodeId k, NodeId dest) const;
    const std::vector<NodeId>& best_forwarders(NodeId i, NodeId dest) const;

    // --- live neighbor state (refreshed every epoch, staleness-checked) ---
    double live_estimate(NodeId i, NodeId k, NodeId dest) const;
    /// Latest piggybacked backlog of neighbor k for commodity d; +inf when
    /// missing or expired.
    double backlog_estimate(NodeId i, NodeId k, NodeId dest) const;

    double queue_average(NodeId i, NodeId dest) const;

  private:
    struct Estimate {
        double value = kPoison;
        double backlog = kPoison;
        std::uint64_t received_epoch = 0;
        bool present = false;
    };

    std::size_t dest_index(NodeId dest) const;
    std::size_t nbr_index(NodeId i, NodeId k) const;
    double expiry_checked(const Estimate& e) const;
    double expiry_checked_backlog(const Estimate& e) const;
    double cross_load(NodeId i, std::size_t dest_idx) const;
    void recompute_node(NodeId i);
    void boundary();

    const Topology* topology_;
    ControlConfig config_;
    RngStream loss_rng_;
    std::function<double(NodeId, NodeId)> link_prob_;
    std::uint64_t epoch_ = 0;

    int n_ = 0;
    std::size_t nd_ = 0;  // destination count

    // Indexing: node-major, destination-minor.
    std::vector<double> virtual_value_;
    std::vector<double> virtual_succ_;
    std::vector<std::vector<NodeId>> virtual_priority_;
    std::vector<double> qbar_;
    std::vector<double> qbar_sum_;
    std::vector<int> qbar_count_;
    std::vector<double> actual_value_;
    std::vector<std::vector<NodeId>> best_forwarders_;

    // Estimates: per node, per neighbor slot, per destination.
    std::vector<std::vector<Estimate>> estimates_;       // [i][k_idx * nd + d_idx]
    std::vector<std::vector<double>> actual_estimates_;  // same indexing, frozen values
};

/// Drives `rounds` control epochs of a cold-started plane against frozen
/// queue lengths (single commodity), then snapshots. This is the test- and
/// analysis-facing route to the distributed fixed-point computation.
ControlPlane run_computation_cycle(const Topology& topology, std::span<const double> frozen_queue,
                                   NodeId dest, const ControlConfig& config, std::uint64_t seed,
                                   int rounds);

}  // namespace orcd
