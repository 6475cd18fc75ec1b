#pragma once

#include <cstdint>
#include <vector>

#include "orcd/rng.hpp"
#include "orcd/topology.hpp"

namespace orcd {

enum class MacMode { kIdealSlotted, kContentionTimed };

/// Frame sizes, PHY rates and MAC constants. Airtime helpers return
/// microseconds.
struct MacConfig {
    MacMode mode = MacMode::kIdealSlotted;
    double data_bytes = 512.0;
    double data_mbps = 11.0;
    double ack_bytes = 24.0;
    double ack_mbps = 11.0;
    double fo_bytes = 20.0;
    double fo_mbps = 1.0;
    double sifs_us = 10.0;
    double phy_slot_us = 20.0;  // backoff slot
    int retry_limit = 7;
    int cw_min = 16;   // initial contention window (backoff slots)
    int cw_max = 1024; // cap after doubling
    bool model_ack_loss = true;
    bool model_fo_loss = true;

    double data_airtime_us() const { return data_bytes * 8.0 / data_mbps; }
    double ack_airtime_us() const { return ack_bytes * 8.0 / ack_mbps; }
    double fo_airtime_us() const { return fo_bytes * 8.0 / fo_mbps; }
    double ack_slot_us() const { return ack_airtime_us() + sifs_us; }
};

enum class HandshakeStatus {
    kHandedOff,    // FO delivered; the chosen node takes the packet
    kRetained,     // transmitter keeps relaying responsibility
    kRetry,        // no acknowledgment heard; retransmit with doubled backoff
    kDroppedRetry, // retry limit exhausted
    kFoLost,       // FO lost: every candidate drops its copy, transmitter retains
};

struct HandshakeOutcome {
    HandshakeStatus status = HandshakeStatus::kRetained;
    NodeId recipient = 0;     // valid for kHandedOff
    double overhead_us = 0.0; // data + ACK slots + FO + backoff airtime charged
};

/// Per-transmitter retry/backoff state.
struct MacState {
    int retries = 0;
    int cw = 16;
};

/// Resolves the acknowledgment + forwarding-order arc for one transmission.
///
/// `heard` is the acknowledged candidate set the transmitter saw (already
/// filtered by reverse-link ACK losses in contention mode); `decision` the
/// chosen next hop (== transmitter for retain). In the ideal mode the
/// hand-off is perfectly reliable and costs no overhead. In contention mode
/// the FO packet reaches the chosen node with the forward link probability;
/// when it is lost all candidates drop their copies and the transmitter
/// retains. ACK slots are charged for `ack_slots` virtual slots per attempt.
HandshakeOutcome resolve_handshake(const Topology& topology, NodeId transmitter,
                                   const std::vector<NodeId>& heard, NodeId decision,
                                   std::size_t ack_slots, const MacConfig& mac, MacState& state,
                                   RngStream& rng);

/// Conflict relation for the contention mode: two nodes conflict when some
/// node can hear both of them.
std::vector<std::vector<char>> build_conflict_graph(const Topology& topology);

}  // namespace orcd
