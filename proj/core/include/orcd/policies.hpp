#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orcd/congestion.hpp"
#include "orcd/topology.hpp"

namespace orcd {

enum class PolicyKind { kDorcd, kPdorcd, kCorcd, kDivbar, kEdivbar, kExor };

PolicyKind policy_from_name(std::string_view name);
std::string_view to_string(PolicyKind kind);

/// True for policies that rank receivers by a metric (congestion measure or
/// ETX); these forward on exact self-vs-receiver ties. The differential
/// backlog policy retains on ties (zero differential is no pressure).
bool is_metric_policy(PolicyKind kind);

struct PolicyDecision {
    NodeId next_hop = 0;  // == transmitter means retain
    NodeId commodity = 0;
};

/// One receiver that acknowledged, with the transmitter's comparison value
/// for it (congestion estimate, backlog differential, ETX, ...).
struct ScoredReceiver {
    NodeId id = 0;
    double score = kPoison;
};

/// Shared argmin over receivers + self. Ties between receivers break to the
/// lowest node id. `forward_on_tie` selects the metric-policy rule (forward
/// when the best receiver matches the self score) versus the backpressure
/// rule (retain unless strictly better).
NodeId select_next_hop(NodeId self, double self_score, std::span<const ScoredReceiver> receivers,
                       bool forward_on_tie);

/// argmin_{k in S + self} Vtilde_k over the actual-table snapshot.
NodeId decide_dorcd(NodeId self, double own_value, std::span<const ScoredReceiver> heard);

/// argmin over (S intersect B*) + self; receivers outside B* are ignored.
NodeId decide_pdorcd(NodeId self, double own_value, std::span<const ScoredReceiver> heard,
                     const std::vector<NodeId>& best_forwarders);

/// argmin_{k in S + self} (Qtilde_k - Q_i); retains when no receiver has a
/// strictly smaller backlog.
NodeId decide_divbar(NodeId self, double own_queue, std::span<const ScoredReceiver> heard_backlogs);

/// argmin_{k in S + self} (Qtilde_k - Q_i) + ETX(k); the self term is
/// 0 + ETX(self).
NodeId decide_edivbar(NodeId self, double own_queue, double own_etx,
                      std::span<const ScoredReceiver> heard_backlog_plus_etx);

/// argmin_{k in S + self} ETX(k).
NodeId decide_exor(NodeId self, double own_etx, std::span<const ScoredReceiver> heard_etx);

/// Commodity choice for the backpressure family:
///   m = argmin_d min_k (Qtilde_k^d - Q_i^d [+ ETX_k^d]),
/// over commodities with positive local backlog; ties break to the lowest
/// destination id. Returns nullopt when nothing is backlogged. FIFO policies
/// instead serve the head-of-line packet's destination (handled by the queue).
std::optional<NodeId> select_commodity_backpressure(
    std::span<const std::pair<NodeId, double>> per_commodity_best_score);

}  // namespace orcd
