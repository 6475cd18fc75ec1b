#include "orcd/congestion.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orcd {

void sort_candidates(std::vector<Candidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.estimate != b.estimate) return a.estimate < b.estimate;
        return a.id < b.id;
    });
}

double success_prob(const Topology& topology, NodeId i, const std::vector<NodeId>& priority) {
    const auto& nbrs = topology.neighbors(i);
    double miss = 1.0;
    for (NodeId k : priority) {
        if (!std::binary_search(nbrs.begin(), nbrs.end(), k))
            throw std::invalid_argument("success_prob: priority set contains a non-neighbor");
        miss *= 1.0 - topology.links()(i, k);
    }
    return 1.0 - miss;
}

std::vector<RelayShare> relay_distribution(const Topology& topology, NodeId i,
                                           const std::vector<std::pair<NodeId, double>>& ordered) {
    if (ordered.empty()) throw std::invalid_argument("relay_distribution: empty priority set");
    double miss = 1.0;
    std::vector<RelayShare> shares;
    shares.reserve(ordered.size());
    for (const auto& [k, v] : ordered) {
        (void)v;
        const double p = topology.links()(i, k);
        shares.push_back({k, p * miss});
        miss *= 1.0 - p;
    }
    const double total = 1.0 - miss;
    if (total <= 0.0) throw std::invalid_argument("relay_distribution: zero success probability");
    for (auto& s : shares) s.probability /= total;
    return shares;
}

double local_drain_time(double success_prob_for_dest, std::span<const CommodityLoad> loads) {
    if (success_prob_for_dest <= 0.0) return kPoison;
    double total = 1.0 / success_prob_for_dest;
    for (const auto& load : loads) {
        if (load.queue_avg <= 0.0) continue;
        if (load.success_prob <= 0.0) return kPoison;
        total += load.queue_avg / load.success_prob;
    }
    return total;
}

double downstream_drain(std::span<const RelayShare> relay_dist,
                        const std::vector<std::pair<NodeId, double>>& estimates) {
    double total = 0.0;
    for (const auto& share : relay_dist) {
        auto it = std::find_if(estimates.begin(), estimates.end(),
                               [&](const auto& e) { return e.first == share.id; });
        if (it == estimates.end())
            throw std::invalid_argument("downstream_drain: missing estimate for relay");
        total += share.probability * it->second;
    }
    return total;
}

SetEvaluation evaluate_forwarder_set(std::span<const Candidate> members, double numerator,
                                     double cross_load) {
    double miss = 1.0;
    double weighted = 0.0;  // sum of (unconditional hear-first prob) * estimate
    for (const auto& c : members) {
        weighted += c.p * miss * c.estimate;
        miss *= 1.0 - c.p;
    }
    const double succ = 1.0 - miss;
    if (succ <= 0.0) return {kPoison, 0.0};
    return {numerator / succ + cross_load + weighted / succ, succ};
}

namespace {

CongestionUpdate evaluate_prefix_rule(std::span<const Candidate> sorted, double numerator,
                                      double cross_load) {
    CongestionUpdate best;
    // Incremental prefix evaluation: keep growing while the next candidate's
    // estimate is below the current measure.
    double miss = 1.0;
    double weighted = 0.0;
    std::size_t used = 0;
    for (std::size_t n = 0; n < sorted.size(); ++n) {
        const Candidate& c = sorted[n];
        if (std::isinf(c.estimate)) break;
        if (used > 0 && best.value <= c.estimate) break;
        weighted += c.p * miss * c.estimate;
        miss *= 1.0 - c.p;
        const double succ = 1.0 - miss;
        if (succ <= 0.0) continue;
        const double value = numerator / succ + cross_load + weighted / succ;
        used = n + 1;
        best.value = value;
        best.success_prob = succ;
    }
    if (used == 0) return {};
    best.priority.reserve(used);
    for (std::size_t n = 0; n < used; ++n) best.priority.push_back(sorted[n].id);
    return best;
}

}  // namespace

CongestionUpdate update_congestion(std::span<const Candidate> candidates, double queue_avg,
                                   double cross_load) {
    std::vector<Candidate> sorted(candidates.begin(), candidates.end());
    sort_candidates(sorted);
    return evaluate_prefix_rule(sorted, 1.0 + queue_avg, cross_load);
}

namespace {

CongestionUpdate bounded_subset_search(std::span<const Candidate> sorted, std::size_t max_size,
                                       double numerator, double cross_load) {
    std::size_t finite = 0;
    while (finite < sorted.size() && !std::isinf(sorted[finite].estimate)) ++finite;

    CongestionUpdate best;
    best.exhaustive = finite <= kSubsetSearchWidth;

    const std::size_t width = std::min(finite, kSubsetSearchWidth);
    std::vector<Candidate> scratch;
    scratch.reserve(max_size);
    for (std::uint32_t mask = 1; mask < (1u << width); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > max_size) continue;
        scratch.clear();
        for (std::size_t b = 0; b < width; ++b)
            if (mask & (1u << b)) scratch.push_back(sorted[b]);
        const SetEvaluation eval = evaluate_forwarder_set(scratch, numerator, cross_load);
        if (eval.value < best.value) {
            best.value = eval.value;
            best.success_prob = eval.success_prob;
            best.priority.clear();
            for (const auto& c : scratch) best.priority.push_back(c.id);
        }
    }

    // Greedy prefix fallback over the full sorted list when candidates were
    // truncated away from the exhaustive window.
    if (finite > width) {
        std::vector<Candidate> prefix;
        for (std::size_t n = 0; n < std::min(finite, max_size); ++n) {
            prefix.push_back(sorted[n]);
            const SetEvaluation eval = evaluate_forwarder_set(prefix, numerator, cross_load);
            if (eval.value < best.value) {
                best.value = eval.value;
                best.success_prob = eval.success_prob;
                best.priority.clear();
                for (const auto& c : prefix) best.priority.push_back(c.id);
            }
        }
    }
    return best;
}

}  // namespace

CongestionUpdate partial_diversity_value(std::span<const Candidate> candidates,
                                         std::size_t max_forwarders, double queue_avg,
                                         double cross_load) {
    if (max_forwarders == 0) throw std::invalid_argument("partial_diversity_value: M must be >= 1");
    std::vector<Candidate> sorted(candidates.begin(), candidates.end());
    sort_candidates(sorted);
    if (max_forwarders >= sorted.size())
        return evaluate_prefix_rule(sorted, 1.0 + queue_avg, cross_load);
    return bounded_subset_search(sorted, max_forwarders, 1.0 + queue_avg, cross_load);
}

double poison_filter(NodeId receiver, double own_value, const std::vector<NodeId>& priority) {
    for (NodeId k : priority)
        if (k == receiver) return kPoison;
    return own_value;
}

FixedPointResult solve_fixed_point(const Topology& topology, std::span<const double> queue,
                                   CostVariant variant, NodeId dest,
                                   std::size_t max_forwarders) {
    const int n = topology.node_count();
    if (dest < 1 || dest > n) throw std::invalid_argument("solve_fixed_point: bad destination");
    if (queue.size() != static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("solve_fixed_point: queue vector must be 1-based of size D+1");

    FixedPointResult result;
    result.value.assign(n + 1, kPoison);
    result.priority.assign(n + 1, {});
    result.value[dest] = 0.0;

    std::vector<double> next(result.value);
    std::vector<Candidate> cands;
    const int sweep_cap = 10 * n;
    for (int sweep = 0; sweep < sweep_cap; ++sweep) {
        double delta = 0.0;
        for (NodeId i = 1; i <= n; ++i) {
            if (i == dest) continue;
            cands.clear();
            for (NodeId j : topology.neighbors(i))
                cands.push_back({j, result.value[j], topology.links()(i, j)});
            sort_candidates(cands);
            const double numerator = variant == CostVariant::kQueue ? queue[i] : 1.0 + queue[i];
            CongestionUpdate upd;
            if (max_forwarders >= cands.size())
                upd = evaluate_prefix_rule(cands, numerator, 0.0);
            else
                upd = bounded_subset_search(cands, max_forwarders, numerator, 0.0);
            next[i] = upd.value;
            result.priority[i] = std::move(upd.priority);
            const double old = result.value[i];
            if (std::isinf(old) && std::isinf(next[i]))
                continue;
            else if (std::isinf(old) || std::isinf(next[i]))
                delta = kPoison;
            else
                delta = std::max(delta, std::abs(next[i] - old));
        }
        result.value = next;
        ++result.sweeps;
        if (delta < kFixedPointTolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

EtxTable::EtxTable(std::vector<NodeId> destinations, int node_count)
    : destinations_(std::move(destinations)),
      node_count_(node_count),
      etx_(destinations_.size() * (node_count + 1), kPoison) {}

std::size_t EtxTable::row(NodeId dest) const {
    for (std::size_t r = 0; r < destinations_.size(); ++r)
        if (destinations_[r] == dest) return r;
    throw std::invalid_argument("EtxTable: unknown destination");
}

double EtxTable::at(NodeId node, NodeId dest) const {
    return etx_[row(dest) * (node_count_ + 1) + static_cast<std::size_t>(node)];
}

void EtxTable::set(NodeId node, NodeId dest, double v) {
    etx_[row(dest) * (node_count_ + 1) + static_cast<std::size_t>(node)] = v;
}

EtxTable etx_table(const Topology& topology) {
    const int n = topology.node_count();
    EtxTable table(topology.destinations(), n);
    for (NodeId dest : topology.destinations()) {
        std::vector<double> etx(n + 1, kPoison);
        etx[dest] = 0.0;
        for (int sweep = 0; sweep < n; ++sweep) {
            bool changed = false;
            for (NodeId i = 1; i <= n; ++i) {
                if (i == dest) continue;
                double best = etx[i];
                for (NodeId j : topology.neighbors(i)) {
                    if (std::isinf(etx[j])) continue;
                    const double via = 1.0 / topology.links()(i, j) + etx[j];
                    if (via < best) best = via;
                }
                if (best < etx[i]) {
                    etx[i] = best;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        for (NodeId i = 1; i <= n; ++i) table.set(i, dest, etx[i]);
    }
    return table;
}

std::uint64_t encode_fixed32(double v) {
    constexpr double kScale = 4294967296.0;  // 2^32
    if (!(v >= 0.0)) throw std::invalid_argument("encode_fixed32: negative value");
    // Values at or beyond the representable range saturate to the poison word.
    if (std::isinf(v) || v >= kScale - 1.0) return ~0ULL;
    return static_cast<std::uint64_t>(std::round(v * kScale));
}

double decode_fixed32(std::uint64_t raw) {
    if (raw == ~0ULL) return kPoison;
    return static_cast<double>(raw) / 4294967296.0;
}

}  // namespace orcd
