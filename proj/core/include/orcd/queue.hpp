#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "orcd/topology.hpp"

namespace orcd {

struct Packet {
    std::uint64_t id = 0;
    NodeId source = 0;
    NodeId destination = 0;
    std::int64_t creation_slot = 0;
    int hop_count = 0;
    int ttl_remaining = 0;
};

/// Per-node queue: one FIFO per commodity plus a global arrival order so that
/// FIFO-discipline policies serve the oldest packet across commodities while
/// backpressure policies serve a selected commodity.
class NodeQueue {
  public:
    explicit NodeQueue(std::size_t capacity_packets) : capacity_(capacity_packets) {}

    std::size_t size() const { return total_; }
    std::size_t size(NodeId dest) const;
    bool full() const { return total_ >= capacity_; }
    bool empty() const { return total_ == 0; }

    /// False when the buffer is full (caller counts the drop).
    bool push(Packet packet, std::uint64_t order);

    /// Head-of-line commodity in global FIFO order.
    std::optional<NodeId> fifo_commodity() const;

    const Packet* head(NodeId dest) const;
    Packet pop(NodeId dest);

    std::vector<NodeId> backlogged_commodities() const;

  private:
    struct Entry {
        Packet packet;
        std::uint64_t order;
    };
    std::size_t capacity_;
    std::size_t total_ = 0;
    std::vector<std::pair<NodeId, std::deque<Entry>>> queues_;  // per commodity

    std::deque<Entry>* find(NodeId dest);
    const std::deque<Entry>* find(NodeId dest) const;
};

struct BurstSpec {
    std::int64_t period_slots = 0;  // 0 disables bursting
    std::int64_t length_slots = 0;
    double rate = 0.0;  // Poisson rate during the on-phase
};

struct TrafficSource {
    NodeId node = 0;
    NodeId destination = 0;
    double rate = 0.0;  // packets per slot
    std::optional<BurstSpec> burst;
};

}  // namespace orcd
