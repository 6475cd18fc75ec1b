#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "orcd/congestion.hpp"
#include "orcd/control.hpp"
#include "orcd/link_estimator.hpp"
#include "orcd/mac.hpp"
#include "orcd/policies.hpp"
#include "orcd/queue.hpp"
#include "orcd/rng.hpp"
#include "orcd/topology.hpp"

namespace orcd {

struct InitialQueueEntry {
    NodeId node = 0;
    NodeId destination = 0;
    int packets = 0;
};

struct SimParams {
    std::int64_t horizon = 100000;
    double warmup_fraction = 0.1;
    int ttl = 64;
    std::size_t buffer_packets = 1464;  // 750 KB of 512-byte packets
    int amax = 20;                      // per-slot arrival batch bound
    std::vector<TrafficSource> traffic;
    std::vector<InitialQueueEntry> initial_queue;
    bool record_node_backlog = true;
    bool record_slot_trace = false;

    std::int64_t warmup_slots() const {
        return static_cast<std::int64_t>(static_cast<double>(horizon) * warmup_fraction);
    }
};

/// Counters and series produced by a run. Packet-removal causes are buffer,
/// ttl and retry; fo_loss_events counts forwarding-order losses (candidates
/// dropping their copies while the transmitter retains the packet), so it is
/// not part of the conservation identity. "Cohort" fields cover packets
/// created at or after the warm-up boundary; reported delay statistics come
/// from the cohort.
struct MetricsLog {
    std::int64_t horizon = 0;
    std::int64_t warmup_slots = 0;

    std::uint64_t created = 0;
    std::uint64_t delivered = 0;
    std::uint64_t drop_buffer = 0;
    std::uint64_t drop_ttl = 0;
    std::uint64_t drop_retry = 0;
    std::uint64_t fo_loss_events = 0;

    std::uint64_t cohort_created = 0;
    std::uint64_t cohort_delivered = 0;
    std::uint64_t cohort_drop_buffer = 0;
    std::uint64_t cohort_drop_ttl = 0;
    std::uint64_t cohort_drop_retry = 0;

    std::vector<std::int64_t> delay_samples;  // cohort deliveries, in slots

    std::vector<double> total_backlog;           // end-of-slot, one per slot
    std::vector<std::uint32_t> node_backlog;     // [slot * (n+1) + node], optional
    int node_backlog_stride = 0;

    std::uint64_t transmissions = 0;
    std::uint64_t ack_slots_total = 0;
    std::uint64_t overhead_data_bytes = 0;
    std::uint64_t overhead_ack_bytes = 0;
    std::uint64_t overhead_fo_bytes = 0;
    double overhead_data_us = 0.0;
    double overhead_ack_us = 0.0;
    double overhead_fo_us = 0.0;
    double overhead_backoff_us = 0.0;

    std::uint64_t transmissions_at_warmup = 0;
    std::uint64_t fo_loss_events_at_warmup = 0;
    double overhead_us_at_warmup = 0.0;

    double overhead_us() const {
        return overhead_data_us + overhead_ack_us + overhead_fo_us + overhead_backoff_us;
    }
    double post_warmup_overhead_us() const { return overhead_us() - overhead_us_at_warmup; }
    std::uint64_t post_warmup_fo_losses() const { return fo_loss_events - fo_loss_events_at_warmup; }

    double mean_delay() const;
    double delay_percentile(double q) const;  // q in [0,1]
    double node_backlog_at(std::int64_t slot, NodeId node) const {
        return node_backlog[static_cast<std::size_t>(slot) * node_backlog_stride + node];
    }
};

/// Queue hand-offs and arrivals of the last slot, for shadow recomputation of
/// the queue recursion in tests.
struct SlotTrace {
    struct HandOff {
        NodeId from, to, commodity;
    };
    std::vector<HandOff> handoffs;  // includes deliveries (to == commodity)
    std::vector<InitialQueueEntry> arrivals;
};

/// Slotted engine: control epochs, per-slot transmissions with opportunistic
/// relay selection, handshake resolution, queue hand-offs, exogenous
/// arrivals, metrics. Deterministic per seed; all randomness sits in per-node
/// substreams of the master seed.
class Simulator {
  public:
    Simulator(Topology topology, PolicyKind policy, std::size_t policy_m, SimParams params,
              MacConfig mac, ControlConfig control, EstimatorConfig estimator, std::uint64_t seed);

    void step();
    void run();  // horizon slots

    std::int64_t slot() const { return slot_; }
    const MetricsLog& metrics() const { return metrics_; }
    const Topology& topology() const { return topology_; }
    const ControlPlane& control() const { return *control_; }
    const SlotTrace& last_trace() const { return trace_; }
    const EtxTable& etx() const { return etx_; }

    double queue_len(NodeId i, NodeId dest) const;
    std::size_t queue_len(NodeId i) const;

    bool conservation_ok() const;

  private:
    struct NodeState {
        std::unique_ptr<NodeQueue> queue;
        MacState mac;
        RngStream channel_rng;
        RngStream mac_rng;
        RngStream arrival_rng;
    };

    struct PendingAction {
        NodeId from = 0;
        NodeId commodity = 0;
        HandshakeOutcome outcome;
    };

    void control_epoch();
    void estimator_window();
    std::vector<NodeId> pick_transmitters();
    std::optional<NodeId> choose_commodity(NodeId i);
    NodeId decide(NodeId i, NodeId commodity, const std::vector<NodeId>& heard);
    void transmit(NodeId i, std::vector<PendingAction>& actions);
    void apply(const PendingAction& action);
    void arrivals();
    void record_metrics();
    void refresh_corcd_tables();
    double link_prob_view(NodeId i, NodeId j) const;

    Topology topology_;
    PolicyKind policy_;
    std::size_t policy_m_;
    SimParams params_;
    MacConfig mac_;
    ControlConfig control_config_;
    EstimatorConfig estimator_config_;
    std::uint64_t seed_;

    std::unique_ptr<ControlPlane> control_;
    LinkEstimator estimator_;
    EtxTable etx_;
    std::vector<NodeState> nodes_;
    std::vector<std::vector<char>> conflict_;
    std::uint64_t round_robin_ = 0;

    // Per-commodity centralized tables (corcd), refreshed every slot.
    std::vector<std::vector<double>> corcd_values_;

    std::int64_t slot_ = 0;
    std::uint64_t next_packet_id_ = 0;
    std::uint64_t next_order_ = 0;
    MetricsLog metrics_;
    SlotTrace trace_;
};

}  // namespace orcd
