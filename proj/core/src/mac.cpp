#include "orcd/mac.hpp"

#include <algorithm>

namespace orcd {

HandshakeOutcome resolve_handshake(const Topology& topology, NodeId transmitter,
                                   const std::vector<NodeId>& heard, NodeId decision,
                                   std::size_t ack_slots, const MacConfig& mac, MacState& state,
                                   RngStream& rng) {
    HandshakeOutcome out;
    out.overhead_us = mac.data_airtime_us() + static_cast<double>(ack_slots) * mac.ack_slot_us();

    if (mac.mode == MacMode::kIdealSlotted) {
        // Reception and relaying are acknowledged perfectly; hand-offs never
        // fail. ACK/FO airtime is still charged as protocol overhead.
        if (!heard.empty()) out.overhead_us += mac.fo_airtime_us();
        if (decision == transmitter || heard.empty()) {
            out.status = HandshakeStatus::kRetained;
        } else {
            out.status = HandshakeStatus::kHandedOff;
            out.recipient = decision;
        }
        return out;
    }

    // Contention mode: charge the sampled backoff for this attempt.
    const double backoff_slots = static_cast<double>(rng.uniform_int(state.cw));
    out.overhead_us += backoff_slots * mac.phy_slot_us;

    if (heard.empty()) {
        // No acknowledgment: every candidate that did receive the data drops
        // its copy at T_wait expiry, the transmitter backs off and retries.
        state.retries += 1;
        state.cw = std::min(state.cw * 2, mac.cw_max);
        if (state.retries > mac.retry_limit) {
            state.retries = 0;
            state.cw = mac.cw_min;
            out.status = HandshakeStatus::kDroppedRetry;
        } else {
            out.status = HandshakeStatus::kRetry;
        }
        return out;
    }

    // ACK stage succeeded: the retry chain resets.
    state.retries = 0;
    state.cw = mac.cw_min;
    out.overhead_us += mac.fo_airtime_us();

    if (decision == transmitter) {
        out.status = HandshakeStatus::kRetained;
        return out;
    }
    const double p_fo = topology.links()(transmitter, decision);
    const bool fo_delivered = !mac.model_fo_loss || rng.bernoulli(p_fo);
    if (fo_delivered) {
        out.status = HandshakeStatus::kHandedOff;
        out.recipient = decision;
    } else {
        out.status = HandshakeStatus::kFoLost;
    }
    return out;
}

std::vector<std::vector<char>> build_conflict_graph(const Topology& topology) {
    const int n = topology.node_count();
    std::vector<std::vector<char>> conflict(n + 1, std::vector<char>(n + 1, 0));
    for (NodeId a = 1; a <= n; ++a) {
        for (NodeId b = a + 1; b <= n; ++b) {
            bool shared = false;
            // Some node (including a and b themselves, p_ii = 1) hears both.
            for (NodeId w = 1; w <= n && !shared; ++w)
                shared = topology.links()(a, w) > 0.0 && topology.links()(b, w) > 0.0;
            conflict[a][b] = conflict[b][a] = shared ? 1 : 0;
        }
    }
    return conflict;
}

}  // namespace orcd
