#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "orcd/topology.hpp"

namespace orcd {

/// Reserved sentinel for "unreachable / poisoned". Arithmetic follows
/// extended-real rules; poisoned neighbors never enter priority sets.
constexpr double kPoison = std::numeric_limits<double>::infinity();

constexpr std::size_t kUnboundedForwarders = static_cast<std::size_t>(-1);

/// Subset-search width for partial-diversity minimization: exhaustive over
/// the kSubsetSearchWidth lowest-estimate candidates, greedy prefix beyond.
constexpr std::size_t kSubsetSearchWidth = 12;

/// A neighbor as seen by the congestion computation: its id, the congestion
/// estimate most recently obtained from it, and the forward link probability.
struct Candidate {
    NodeId id = 0;
    double estimate = kPoison;
    double p = 0.0;
};

/// Orders candidates the way every computation in this artifact does:
/// ascending estimate, ties by ascending node id.
void sort_candidates(std::vector<Candidate>& candidates);

/// P^{(i,d)}: probability that at least one member of the priority set hears
/// a transmission, 1 - prod_{k in H} (1 - p_ik). Throws if H is not a subset
/// of neighbors(i).
double success_prob(const Topology& topology, NodeId i, const std::vector<NodeId>& priority);

struct RelayShare {
    NodeId id;
    double probability;  // conditional on at least one member hearing
};

/// Conditional relay distribution over an ordered priority set:
///   P_succ-k = p_ik * prod_{j earlier} (1 - p_ij) / P^{(i,d)}.
/// `ordered` must be sorted by ascending (estimate, id); shares sum to 1.
/// Throws on an empty set or zero success probability.
std::vector<RelayShare> relay_distribution(const Topology& topology, NodeId i,
                                           const std::vector<std::pair<NodeId, double>>& ordered);

/// One (queue average, success probability) pair per commodity at a node.
struct CommodityLoad {
    double queue_avg = 0.0;
    double success_prob = 1.0;
};

/// L_i^d = 1/P^{(i,d)} + sum_{d'} Qbar^{d'} / P^{(i,d')}. The commodity's own
/// load appears inside the sum as well, exactly as stated. Returns +inf when
/// a needed success probability is zero.
double local_drain_time(double success_prob_for_dest, std::span<const CommodityLoad> loads);

/// D_i^d = sum_k P_succ-k * Vtilde_k, the conditional downstream expectation.
/// `estimates` must contain every relay id; throws otherwise.
double downstream_drain(std::span<const RelayShare> relay_dist,
                        const std::vector<std::pair<NodeId, double>>& estimates);

/// Result of evaluating one forwarder set B:
///   value = numerator / P(B) + cross_load + sum_{k in B} P_succ-k(B) * est_k.
struct SetEvaluation {
    double value = kPoison;
    double success_prob = 0.0;
};

/// `members` must be sorted by ascending (estimate, id). `numerator` is the
/// local cost mass (1 + Qbar for the live measure, Q for the centralized
/// variant); `cross_load` carries the other commodities' Qbar/P terms.
SetEvaluation evaluate_forwarder_set(std::span<const Candidate> members, double numerator,
                                     double cross_load);

struct CongestionUpdate {
    double value = kPoison;       // V_i^d
    double success_prob = 0.0;    // P^{(i,d)} over the chosen set
    std::vector<NodeId> priority; // chosen set, ascending (estimate, id) order
    bool exhaustive = true;       // false when the subset search was truncated
};

/// The self-consistent (V, H) pair: grow the candidate prefix in ascending
/// estimate order, recomputing V = L + D after each inclusion, while the next
/// candidate's estimate stays below the current V. Poisoned candidates never
/// enter. Returns V = +inf when no candidate has a finite estimate.
CongestionUpdate update_congestion(std::span<const Candidate> candidates, double queue_avg,
                                   double cross_load);

/// Minimizes over forwarder sets B with |B| <= max_forwarders. Exhaustive
/// over subsets of the kSubsetSearchWidth lowest-estimate candidates; greedy
/// prefix fallback beyond that width (flagged via `exhaustive = false`).
/// With max_forwarders >= candidate count this reproduces update_congestion.
CongestionUpdate partial_diversity_value(std::span<const Candidate> candidates,
                                         std::size_t max_forwarders, double queue_avg,
                                         double cross_load);

/// Split-horizon with poison reverse: the value node i advertises to receiver
/// j is +inf when i currently routes through j (j in H), else V_i.
double poison_filter(NodeId receiver, double own_value, const std::vector<NodeId>& priority);

enum class CostVariant {
    kQueue,        // numerator Q_i (centralized fixed point)
    kQueuePlusOne, // numerator 1 + Q_i (live congestion measure)
};

struct FixedPointResult {
    std::vector<double> value;                 // 1-based; value[0] unused
    std::vector<std::vector<NodeId>> priority; // per node, chosen set
    int sweeps = 0;
    bool converged = false;
};

constexpr double kFixedPointTolerance = 1e-10;

/// Value iteration from V = 0 at the destination and +inf elsewhere, relaxing
/// every node with the same prefix-growing rule as update_congestion (or the
/// bounded-subset rule when max_forwarders < D), until the sup-norm change
/// drops below kFixedPointTolerance. Sweep cap: 10 * node count.
FixedPointResult solve_fixed_point(const Topology& topology, std::span<const double> queue,
                                   CostVariant variant, NodeId dest,
                                   std::size_t max_forwarders = kUnboundedForwarders);

/// Expected-transmission-count table, one row per destination.
class EtxTable {
  public:
    EtxTable() = default;
    EtxTable(std::vector<NodeId> destinations, int node_count);

    double at(NodeId node, NodeId dest) const;
    void set(NodeId node, NodeId dest, double v);
    const std::vector<NodeId>& destinations() const { return destinations_; }

  private:
    std::size_t row(NodeId dest) const;
    std::vector<NodeId> destinations_;
    int node_count_ = 0;
    std::vector<double> etx_;
};

/// Unipath Bellman-Ford fixed point of ETX(k) = min_j { 1/p_kj + ETX(j) }.
/// Unreachable nodes keep +inf entries.
EtxTable etx_table(const Topology& topology);

/// Control packets carry congestion values as unsigned 32.32 fixed point;
/// all-ones encodes the poison value.
std::uint64_t encode_fixed32(double v);
double decode_fixed32(std::uint64_t raw);

}  // namespace orcd
