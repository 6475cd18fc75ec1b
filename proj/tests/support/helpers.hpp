#pragma once

// Shared test fixtures and independent oracles. Everything here recomputes
// results by exhaustive enumeration or classic algorithms so that the library
// implementations are checked against a second route, not against themselves.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <vector>

#include "orcd/congestion.hpp"
#include "orcd/rng.hpp"
#include "orcd/topology.hpp"

namespace orcd::test {

inline Topology make_topology(int n, const std::vector<std::tuple<int, int, double>>& links,
                              std::vector<NodeId> dests, bool symmetric = true) {
    LinkMatrix m(n);
    for (const auto& [a, b, p] : links) {
        if (symmetric)
            m.set_symmetric(a, b, p);
        else
            m.set(a, b, p);
    }
    return Topology(std::move(m), std::move(dests));
}

/// Random connected net: a random tree oriented toward the destination plus
/// extra edges, all with qualities in [0.25, 1].
inline Topology random_connected(RngStream& rng, int n, double extra_edge_prob, NodeId dest) {
    LinkMatrix m(n);
    std::vector<NodeId> placed{dest};
    for (NodeId i = 1; i <= n; ++i) {
        if (i == dest) continue;
        const NodeId anchor = placed[rng.uniform_int(placed.size())];
        m.set_symmetric(i, anchor, 0.25 + 0.75 * rng.uniform01());
        placed.push_back(i);
    }
    for (NodeId a = 1; a <= n; ++a)
        for (NodeId b = a + 1; b <= n; ++b)
            if (m(a, b) == 0.0 && rng.bernoulli(extra_edge_prob))
                m.set_symmetric(a, b, 0.25 + 0.75 * rng.uniform01());
    return Topology(std::move(m), {dest});
}

/// P(S) by direct product, written independently of the library path.
inline double oracle_subset_prob(const Topology& t, NodeId i, const std::vector<NodeId>& subset) {
    double prob = 1.0;
    for (NodeId j : t.neighbors(i)) {
        const bool in = std::find(subset.begin(), subset.end(), j) != subset.end();
        const double p = t.links()(i, j);
        prob *= in ? p : 1.0 - p;
    }
    return prob;
}

/// Success probability by exhaustive subset summation: the probability that
/// at least one priority-set member appears in the realized forwarder set.
inline double oracle_success_prob(const Topology& t, NodeId i, const std::vector<NodeId>& priority) {
    const auto& nbrs = t.neighbors(i);
    const std::size_t deg = nbrs.size();
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << deg); ++mask) {
        std::vector<NodeId> subset;
        for (std::size_t b = 0; b < deg; ++b)
            if (mask & (1u << b)) subset.push_back(nbrs[b]);
        bool hit = false;
        for (NodeId k : priority)
            if (std::find(subset.begin(), subset.end(), k) != subset.end()) hit = true;
        if (hit) total += oracle_subset_prob(t, i, subset);
    }
    return total;
}

/// Conditional relay shares by exhaustive subset summation: for each realized
/// set, the relay is the member of (S intersect H) with the smallest
/// (estimate, id).
inline std::map<NodeId, double> oracle_relay_distribution(
    const Topology& t, NodeId i, const std::vector<std::pair<NodeId, double>>& priority) {
    const auto& nbrs = t.neighbors(i);
    const std::size_t deg = nbrs.size();
    std::map<NodeId, double> mass;
    double success = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << deg); ++mask) {
        std::vector<NodeId> subset;
        for (std::size_t b = 0; b < deg; ++b)
            if (mask & (1u << b)) subset.push_back(nbrs[b]);
        NodeId winner = 0;
        double winner_v = std::numeric_limits<double>::infinity();
        for (const auto& [k, v] : priority) {
            if (std::find(subset.begin(), subset.end(), k) == subset.end()) continue;
            if (v < winner_v || (v == winner_v && k < winner)) {
                winner = k;
                winner_v = v;
            }
        }
        if (winner == 0) continue;
        const double p = oracle_subset_prob(t, i, subset);
        mass[winner] += p;
        success += p;
    }
    for (auto& [k, v] : mass) v /= success;
    return mass;
}

/// Value iteration with exhaustive subset minimization and subset-sum relay
/// shares; independent of the prefix-growing implementation.
inline std::vector<double> oracle_fixed_point(const Topology& t, const std::vector<double>& queue,
                                              bool cost_plus_one, NodeId dest,
                                              std::size_t max_set = SIZE_MAX) {
    const int n = t.node_count();
    std::vector<double> v(n + 1, std::numeric_limits<double>::infinity());
    v[dest] = 0.0;
    for (int sweep = 0; sweep < 60 * n; ++sweep) {
        std::vector<double> next(v);
        double delta = 0.0;
        for (NodeId i = 1; i <= n; ++i) {
            if (i == dest) continue;
            const auto& nbrs = t.neighbors(i);
            const std::size_t deg = nbrs.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t bmask = 1; bmask < (1u << deg); ++bmask) {
                std::vector<std::pair<NodeId, double>> members;
                bool usable = true;
                for (std::size_t b = 0; b < deg; ++b) {
                    if (!(bmask & (1u << b))) continue;
                    if (std::isinf(v[nbrs[b]])) {
                        usable = false;
                        break;
                    }
                    members.emplace_back(nbrs[b], v[nbrs[b]]);
                }
                if (!usable || members.empty() || members.size() > max_set) continue;
                const double succ = oracle_success_prob(
                    t, i, [&] {
                        std::vector<NodeId> ids;
                        for (auto& [k, val] : members) ids.push_back(k);
                        return ids;
                    }());
                if (succ <= 0.0) continue;
                const auto shares = oracle_relay_distribution(t, i, members);
                double downstream = 0.0;
                for (const auto& [k, share] : shares) downstream += share * v[k];
                const double cost = cost_plus_one ? 1.0 + queue[i] : queue[i];
                best = std::min(best, cost / succ + downstream);
            }
            next[i] = best;
            if (!std::isinf(v[i]) || !std::isinf(next[i]))
                delta = std::max(delta, std::isinf(v[i]) || std::isinf(next[i])
                                            ? std::numeric_limits<double>::infinity()
                                            : std::abs(next[i] - v[i]));
        }
        v = next;
        if (delta < 1e-12) break;
    }
    return v;
}

/// Dijkstra over 1/p edge weights; independent of the Bellman-Ford path.
inline std::vector<double> oracle_etx(const Topology& t, NodeId dest) {
    const int n = t.node_count();
    std::vector<double> dist(n + 1, std::numeric_limits<double>::infinity());
    dist[dest] = 0.0;
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, dest});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        // Relax incoming edges: dist[x] over x with p_xu > 0.
        for (NodeId x = 1; x <= n; ++x) {
            if (x == u) continue;
            const double p = t.links()(x, u);
            if (p <= 0.0) continue;
            const double cand = d + 1.0 / p;
            if (cand < dist[x]) {
                dist[x] = cand;
                heap.push({cand, x});
            }
        }
    }
    return dist;
}

/// Chi-square critical values at significance 0.001 for the dfs used here.
inline double chi2_crit_999(int df) {
    switch (df) {
        case 1: return 10.828;
        case 3: return 16.266;
        case 7: return 24.322;
        case 15: return 37.697;
        default: return 0.0;  // unsupported df: force failure
    }
}

}  // namespace orcd::test
