// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "orcd/analysis.hpp"
#include "orcd/csv.hpp"
#include "orcd/runner.hpp"
#include "orcd/scenario.hpp"
#include "orcd/sim.hpp"
#include "support/helpers.hpp"

using namespace orcd;

namespace {

struct Check {
    std::string id;
    std::string name;
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------- fixtures

Topology two_relay() {
    return test::make_topology(4, {{1, 2, 0.5}, {1, 3, 0.5}, {2, 4, 1.0}, {3, 4, 1.0}}, {4});
}

// Source, bottleneck relay, two-hop branch, destination 5 - the canonical
// structure without the hole chain.
Topology five_node_fork() {
    return test::make_topology(
        5, {{1, 2, 0.8}, {1, 3, 0.8}, {2, 5, 0.5}, {3, 4, 0.8}, {4, 5, 0.8}}, {5});
}

double theta_star(const Topology& t, NodeId source, NodeId dest) {
    std::vector<double> dir(t.node_count() + 1, 0.0);
    dir[source] = 1.0;
    return stability_region_max_rate(t, dir, dest);
}

struct RunSpec {
    Topology topology;
    PolicyKind policy = PolicyKind::kDorcd;
    std::size_t m = kUnboundedForwarders;
    std::vector<TrafficSource> traffic;
    std::int64_t horizon = 100000;
    double warmup = 0.1;
    int ts_slots = 50;
    int tc_multiple = 1;
    bool poison = true;
    MacMode mode = MacMode::kIdealSlotted;
    int ttl = 64;
    std::size_t buffer_packets = 1464;
};

MetricsLog run_spec(const RunSpec& spec, std::uint64_t seed) {
    SimParams params;
    params.horizon = spec.horizon;
    params.warmup_fraction = spec.warmup;
    params.traffic = spec.traffic;
    params.ttl = spec.ttl;
    params.buffer_packets = spec.buffer_packets;
    MacConfig mac;
    mac.mode = spec.mode;
    ControlConfig control;
    control.ts_slots = spec.ts_slots;
    control.tc_multiple = spec.tc_multiple;
    control.poison_reverse = spec.poison;
    Simulator sim(spec.topology, spec.policy, spec.m, params, mac, control, {}, seed);
    sim.run();
    return sim.metrics();
}

std::vector<double> post_warmup_total(const MetricsLog& metrics) {
    return {metrics.total_backlog.begin() + metrics.warmup_slots, metrics.total_backlog.end()};
}

double mean_node_backlog_last_half(const MetricsLog& metrics, NodeId node) {
    const std::int64_t slots = static_cast<std::int64_t>(metrics.total_backlog.size());
    double sum = 0.0;
    for (std::int64_t t = slots / 2; t < slots; ++t) sum += metrics.node_backlog_at(t, node);
    return sum / static_cast<double>(slots - slots / 2);
}

double seed_mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------- criteria

// Relay distributions and success probabilities against brute-force subset
// enumeration, 1000 random instances, <= 8 neighbors, 1e-12.
bool c1_probability_oracles(std::string& detail) {
    RngStream rng(1001);
    double worst = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        const int deg = 1 + static_cast<int>(rng.uniform_int(8));
        LinkMatrix m(deg + 1);
        std::vector<std::pair<NodeId, double>> priority;
        for (NodeId j = 2; j <= deg + 1; ++j) {
            m.set(1, j, 0.02 + 0.98 * rng.uniform01());
            if (rng.bernoulli(0.75)) priority.emplace_back(j, rng.uniform01() * 12.0);
        }
        if (priority.empty()) priority.emplace_back(2, 1.0);
        std::sort(priority.begin(), priority.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        });
        const Topology t(m, {static_cast<NodeId>(deg + 1)});

        std::vector<NodeId> ids;
        for (const auto& [k, v] : priority) ids.push_back(k);
        worst = std::max(worst, std::abs(success_prob(t, 1, ids) -
                                         test::oracle_success_prob(t, 1, ids)));

        const auto shares = relay_distribution(t, 1, priority);
        const auto oracle = test::oracle_relay_distribution(t, 1, priority);
        double total = 0.0;
        for (const auto& s : shares) {
            total += s.probability;
            worst = std::max(worst, std::abs(s.probability - oracle.at(s.id)));
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    detail = "max |impl - enumeration| = " + format_double(worst);
    return worst < 1e-12;
}

// Fixed point: plug-back residual < 1e-9 and independent value-iteration
// oracle agreement < 1e-9 on 100 random connected 5-node nets, both variants.
bool c2_fixed_point(std::string& detail) {
    RngStream rng(1002);
    double worst_residual = 0.0, worst_gap = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const Topology t = test::random_connected(rng, 5, 0.4, 5);
        std::vector<double> q(6, 0.0);
        for (NodeId i = 1; i <= 4; ++i) q[i] = rng.uniform01() * 8.0;
        for (const bool plus_one : {false, true}) {
            const auto fp = solve_fixed_point(
                t, q, plus_one ? CostVariant::kQueuePlusOne : CostVariant::kQueue, 5);
            if (!fp.converged) {
                detail = "value iteration failed to converge";
                return false;
            }
            const auto oracle = test::oracle_fixed_point(t, q, plus_one, 5);
            for (NodeId i = 1; i <= 5; ++i)
                if (!std::isinf(oracle[i]))
                    worst_gap = std::max(worst_gap, std::abs(fp.value[i] - oracle[i]));

            for (NodeId i = 1; i <= 4; ++i) {
                std::vector<Candidate> cands;
                for (NodeId j : t.neighbors(i)) cands.push_back({j, fp.value[j], t.links()(i, j)});
                const double numerator = plus_one ? 1.0 + q[i] : q[i];
                std::vector<Candidate> sorted(cands);
                sort_candidates(sorted);
                double best = kPoison;
                for (std::size_t len = 1; len <= sorted.size(); ++len)
                    best = std::min(best, evaluate_forwarder_set(
                                              std::span<const Candidate>(sorted.data(), len),
                                              numerator, 0.0)
                                              .value);
                worst_residual = std::max(worst_residual, std::abs(fp.value[i] - best));
            }
        }
    }
    detail = "residual " + format_double(worst_residual) + ", oracle gap " + format_double(worst_gap);
    return worst_residual < 1e-9 && worst_gap < 1e-9;
}

// Unit queues, M = 1, single destination: live-variant fixed point equals
// 2 * ETX and induces the same neighbor ranking.
bool c3_etx_reduction(std::string& detail) {
    RngStream rng(1003);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int n = 4 + static_cast<int>(rng.uniform_int(3));
        const Topology t = test::random_connected(rng, n, 0.4, n);
        std::vector<double> q(n + 1, 1.0);
        q[0] = 0.0;
        q[n] = 0.0;
        const auto fp = solve_fixed_point(t, q, CostVariant::kQueuePlusOne, n, 1);
        const auto table = etx_table(t);
        for (NodeId i = 1; i <= n; ++i) {
            const double etx = table.at(i, n);
            if (std::isinf(etx)) continue;
            worst = std::max(worst, std::abs(fp.value[i] - 2.0 * etx));
        }
        for (NodeId i = 1; i < n; ++i) {
            auto by_v = t.neighbors(i);
            auto by_etx = t.neighbors(i);
            std::sort(by_v.begin(), by_v.end(), [&](NodeId a, NodeId b) {
                if (fp.value[a] != fp.value[b]) return fp.value[a] < fp.value[b];
                return a < b;
            });
            std::sort(by_etx.begin(), by_etx.end(), [&](NodeId a, NodeId b) {
                if (table.at(a, n) != table.at(b, n)) return table.at(a, n) < table.at(b, n);
                return a < b;
            });
            if (by_v != by_etx) {
                detail = "ranking mismatch at node " + std::to_string(i);
                return false;
            }
        }
    }
    detail = "max |V - 2*ETX| = " + format_double(worst);
    return worst < 1e-9;
}

// Bounded at 0.8 theta*, unbounded at 1.2 theta*, 5/5 seeds, two nets.
bool c4_throughput_optimality(std::string& detail) {
    struct Net {
        const char* label;
        Topology topology;
        NodeId source, dest;
    };
    std::vector<Net> nets;
    nets.push_back({"two-relay", two_relay(), 1, 4});
    nets.push_back({"five-fork", five_node_fork(), 1, 5});

    detail.clear();
    for (auto& net : nets) {
        const double theta = theta_star(net.topology, net.source, net.dest);
        const int rounds = net.topology.node_count();
        for (const double scale : {0.8, 1.2}) {
            const bool expect_bounded = scale < 1.0;
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                RunSpec spec;
                spec.topology = net.topology;
                spec.traffic = {{net.source, net.dest, scale * theta, std::nullopt}};
                spec.horizon = 200000;
                spec.ts_slots = 10;
                spec.tc_multiple = rounds;  // T_c/T_s >= D
                spec.buffer_packets = 10000000;  // the stability model has no buffer losses
                const MetricsLog metrics = run_spec(spec, seed);
                const auto verdict = stability_verdict(post_warmup_total(metrics));
                if (verdict.bounded != expect_bounded) {
                    detail = std::string(net.label) + " seed " + std::to_string(seed) + " at " +
                             format_double(scale) + "*theta (theta=" + format_double(theta) +
                             "): bounded=" + (verdict.bounded ? "1" : "0") +
                             " slope=" + format_double(verdict.slope);
                    return false;
                }
            }
        }
        detail += std::string(net.label) + " theta*=" + format_double(theta) + "  ";
    }
    detail += "20/20 verdicts correct";
    return true;
}

// ExOR pins traffic on the low-ETX relay; congestion diversity spreads it.
bool c5_shortest_path_pathology(std::string& detail) {
    CanonicalParams params;
    params.hole_size = 2;
    const Topology t = generate_canonical(params);
    const double theta = theta_star(t, 1, 5);

    int delay_wins = 0;
    std::vector<double> exor_backlog, dorcd_backlog;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RunSpec spec;
        spec.topology = t;
        spec.traffic = {{1, 5, 0.9 * theta, std::nullopt}};
        spec.horizon = 100000;
        spec.ts_slots = 25;
        spec.tc_multiple = 1;

        spec.policy = PolicyKind::kDorcd;
        const MetricsLog dorcd = run_spec(spec, seed);
        spec.policy = PolicyKind::kExor;
        const MetricsLog exor = run_spec(spec, seed);

        if (exor.mean_delay() > dorcd.mean_delay()) ++delay_wins;
        exor_backlog.push_back(mean_node_backlog_last_half(exor, 2));
        dorcd_backlog.push_back(mean_node_backlog_last_half(dorcd, 2));
    }
    const double ratio = seed_mean(exor_backlog) / std::max(1e-9, seed_mean(dorcd_backlog));
    detail = "delay wins " + std::to_string(delay_wins) + "/5, relay-2 backlog ratio " +
             format_double(ratio) + " (theta*=" + format_double(theta) + ")";
    return delay_wins >= 4 && ratio >= 5.0;
}

// Negative drift of the piecewise quadratic above the top-quartile backlog.
bool c6_negative_drift(std::string& detail) {
    const Topology t = two_relay();
    const double theta = theta_star(t, 1, 4);
    const auto config = LyapunovConfig::from_topology(t);

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RunSpec spec;
        spec.topology = t;
        spec.traffic = {{1, 4, 0.8 * theta, std::nullopt}};
        spec.horizon = 200000;
        spec.ts_slots = 50;
        spec.tc_multiple = 4;
        spec.buffer_packets = 10000000;
        const MetricsLog metrics = run_spec(spec, seed);

        const auto lyap = lyapunov_series(t, metrics, 4, config, metrics.warmup_slots);
        const auto total = post_warmup_total(metrics);
        const auto drift = drift_estimate(total, lyap);

        std::vector<double> sorted(total);
        std::sort(sorted.begin(), sorted.end());
        const double top_quartile = sorted[sorted.size() * 3 / 4];

        for (const auto& bin : drift.bins) {
            if (!bin.sufficient || bin.center <= top_quartile) continue;
            if (bin.mean_drift >= 0.0) {
                detail = "seed " + std::to_string(seed) + ": bin at " + format_double(bin.center) +
                         " has drift " + format_double(bin.mean_drift);
                return false;
            }
        }
        if (drift.eps_hat <= 0.0) {
            detail = "seed " + std::to_string(seed) + ": eps_hat " + format_double(drift.eps_hat);
            return false;
        }
        detail = "eps_hat " + format_double(drift.eps_hat) + " (seed " + std::to_string(seed) + ")";
    }
    return true;
}

// The hole barely affects congestion-diversity routing while backpressure
// wanders deeper as it grows.
bool c7_hole_insensitivity(std::string& detail) {
    std::vector<double> dorcd_means, divbar_means;
    for (int hole = 1; hole <= 5; ++hole) {
        CanonicalParams params;
        params.hole_size = hole;
        const Topology t = generate_canonical(params);
        std::vector<double> dorcd_delays, divbar_delays;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            RunSpec spec;
            spec.topology = t;
            spec.traffic = {{1, 5, 0.25, std::nullopt}};
            spec.horizon = 60000;
            spec.ts_slots = 25;
            spec.tc_multiple = 1;
            spec.policy = PolicyKind::kDorcd;
            dorcd_delays.push_back(run_spec(spec, seed).mean_delay());
            spec.policy = PolicyKind::kDivbar;
            divbar_delays.push_back(run_spec(spec, seed).mean_delay());
        }
        dorcd_means.push_back(seed_mean(dorcd_delays));
        divbar_means.push_back(seed_mean(divbar_delays));
    }
    const double lo = *std::min_element(dorcd_means.begin(), dorcd_means.end());
    const double hi = *std::max_element(dorcd_means.begin(), dorcd_means.end());
    const double variation = hi / lo - 1.0;
    bool divbar_monotone = true;
    for (std::size_t k = 1; k < divbar_means.size(); ++k)
        if (divbar_means[k] < divbar_means[k - 1]) divbar_monotone = false;
    detail = "dorcd variation " + format_double(variation) + ", divbar means";
    for (double m : divbar_means) detail += " " + format_double(m);
    return variation <= 0.15 && divbar_monotone;
}

// Blocked grid with non-uniform traffic at high load: congestion diversity
// beats the additive hybrid, which beats pure backpressure, by >= 10% each.
bool c8_asymmetric_grid_ordering(std::string& detail) {
    // Wall between the middle columns with two passages: a short one at the
    // destination row whose entry node both carries cross traffic and drains
    // over a weak link, and a long good one at the far row. Counting queued
    // packets understates the entry node's draining time by 1/p, so the
    // additive backlog+ETX rule keeps feeding it long after the
    // draining-time measure has moved traffic to the detour.
    GridParams grid;
    grid.rows = 4;
    grid.cols = 4;
    grid.p_adjacent = 0.8;
    grid.p_diagonal = 0.0;
    grid.destination = 1;
    grid.overrides = {{6, 7, 0.0}, {10, 11, 0.0}, {2, 3, 0.30}, {14, 15, 0.90}};
    const Topology t = generate_grid(grid);

    int ordering_ok = 0;
    double d_mean = 0.0, e_mean = 0.0, q_mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RunSpec spec;
        spec.topology = t;
        spec.traffic = {{4, 1, 0.20, std::nullopt}, {8, 1, 0.15, std::nullopt},
                        {3, 1, 0.20, std::nullopt}};
        spec.horizon = 80000;
        spec.ts_slots = 5;
        spec.tc_multiple = 1;

        spec.policy = PolicyKind::kDorcd;
        const double dorcd = run_spec(spec, seed).mean_delay();
        spec.policy = PolicyKind::kEdivbar;
        const double edivbar = run_spec(spec, seed).mean_delay();
        spec.policy = PolicyKind::kDivbar;
        const double divbar = run_spec(spec, seed).mean_delay();
        d_mean += dorcd / 5;
        e_mean += edivbar / 5;
        q_mean += divbar / 5;
        if (edivbar >= 1.1 * dorcd && divbar >= 1.1 * edivbar) ++ordering_ok;
    }
    detail = "seed-mean delays dorcd " + format_double(d_mean) + ", edivbar " +
             format_double(e_mean) + ", divbar " + format_double(q_mean) + "; ordered seeds " +
             std::to_string(ordering_ok) + "/5";
    return ordering_ok >= 4 && d_mean < e_mean && e_mean < q_mean;
}

// Partial diversity: the capped measure never improves with a tighter cap,
// and the M sweep trades overhead against delay.
bool c9_partial_diversity(std::string& detail) {
    RngStream rng(1009);
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t deg = 1 + rng.uniform_int(8);
        std::vector<Candidate> cands;
        for (std::size_t k = 0; k < deg; ++k)
            cands.push_back({static_cast<NodeId>(k + 2), rng.uniform01() * 15.0,
                             0.05 + 0.95 * rng.uniform01()});
        const double qbar = rng.uniform01() * 6.0;
        double previous = kPoison;
        for (std::size_t cap = 1; cap <= deg; ++cap) {
            const double value = partial_diversity_value(cands, cap, qbar, 0.0).value;
            if (value > previous + 1e-12) {
                detail = "value increased with M at instance " + std::to_string(inst);
                return false;
            }
            previous = value;
        }
    }

    GridParams grid;
    grid.p_diagonal = 0.4;
    const Topology t = generate_grid(grid);
    std::vector<double> overheads, delays;
    for (std::size_t m = 1; m <= 4; ++m) {
        std::vector<double> o, d;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            RunSpec spec;
            spec.topology = t;
            spec.policy = PolicyKind::kPdorcd;
            spec.m = m;
            spec.traffic = {{16, 1, 0.20, std::nullopt}, {13, 1, 0.15, std::nullopt}};
            spec.horizon = 50000;
            spec.ts_slots = 25;
            spec.tc_multiple = 1;
            const MetricsLog metrics = run_spec(spec, seed);
            o.push_back(metrics.overhead_ack_us);
            d.push_back(metrics.mean_delay());
        }
        overheads.push_back(seed_mean(o));
        delays.push_back(seed_mean(d));
    }
    bool overhead_increasing = true;
    for (std::size_t k = 1; k < overheads.size(); ++k)
        if (overheads[k] <= overheads[k - 1]) overhead_increasing = false;
    bool delay_non_increasing = true;
    for (std::size_t k = 1; k < delays.size(); ++k)
        if (delays[k] > delays[k - 1] * 1.05) delay_non_increasing = false;  // noise allowance
    detail = "ack airtime(us)";
    for (double o : overheads) detail += " " + format_double(o);
    detail += "; delay";
    for (double d : delays) detail += " " + format_double(d);
    return overhead_increasing && delay_non_increasing;
}

// Split horizon with poison reverse halves the TTL-drop fraction under
// bursts at the responsive setting T_c = T_s.
bool c10_loop_avoidance(std::string& detail) {
    const Topology t = test::make_topology(
        4, {{1, 2, 0.9}, {1, 3, 0.6}, {2, 3, 0.6}, {3, 4, 0.9}}, {4});

    const auto ttl_fraction = [&](bool poison) {
        std::uint64_t drops = 0, created = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            RunSpec spec;
            spec.topology = t;
            spec.traffic = {{1, 4, 0.05, std::nullopt},
                            {2, 4, 0.05, std::nullopt},
                            {3, 4, 0.02, BurstSpec{2500, 6, 15.0}}};
            spec.horizon = 30000;
            spec.warmup = 0.0;
            spec.ts_slots = 10;
            spec.tc_multiple = 1;  // the responsive setting
            spec.ttl = 10;
            spec.poison = poison;
            const MetricsLog metrics = run_spec(spec, seed);
            drops += metrics.drop_ttl;
            created += metrics.created;
        }
        return std::make_pair(static_cast<double>(drops) / static_cast<double>(created), drops);
    };

    const auto [with_poison, drops_on] = ttl_fraction(true);
    const auto [without, drops_off] = ttl_fraction(false);
    detail = "ttl-drop fraction poisoned " + format_double(with_poison) + " (" +
             std::to_string(drops_on) + "), plain " + format_double(without) + " (" +
             std::to_string(drops_off) + ")";
    return without > 0.0 && with_poison <= 0.5 * without;
}

// Bit-identical results for identical seeds.
bool c11_determinism(std::string& detail) {
    ScenarioConfig config;
    config.name = "determinism";
    config.topology.kind = TopologySpec::Kind::kCanonical;
    config.topology.canonical.hole_size = 2;
    config.policy = PolicyKind::kPdorcd;
    config.policy_m = 2;
    config.sim.horizon = 20000;
    config.sim.traffic.push_back({1, 5, 0.4});
    config.control.ts_slots = 25;
    config.control.tc_multiple = 2;
    config.mac.mode = MacMode::kContentionTimed;
    config.seeds = {7, 8, 9};

    const auto once = [&]() {
        std::vector<ResultRow> rows;
        for (const auto& run : run_seeds(config, 2))
            rows.push_back(summarize(config, run.seed, run.metrics, ""));
        return results_csv_string(rows);
    };
    const std::string first = once();
    const std::string second = once();
    detail = first == second ? "identical across re-runs" : "re-run diverged";
    return first == second;
}

}  // namespace

int main() {
    std::vector<Check> checks = {
        {"ACCEPT-01", "probability-oracles", c1_probability_oracles},
        {"ACCEPT-02", "fixed-point", c2_fixed_point},
        {"ACCEPT-03", "etx-reduction", c3_etx_reduction},
        {"ACCEPT-04", "throughput-optimality", c4_throughput_optimality},
        {"ACCEPT-05", "shortest-path-pathology", c5_shortest_path_pathology},
        {"ACCEPT-06", "negative-drift", c6_negative_drift},
        {"ACCEPT-07", "hole-insensitivity", c7_hole_insensitivity},
        {"ACCEPT-08", "asymmetric-grid-ordering", c8_asymmetric_grid_ordering},
        {"ACCEPT-09", "partial-diversity", c9_partial_diversity},
        {"ACCEPT-10", "loop-avoidance", c10_loop_avoidance},
        {"ACCEPT-11", "determinism", c11_determinism},
    };

    int failures = 0;
    for (auto& check : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = check.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %-28s %s (%.1fs) %s\n", check.id.c_str(), check.name.c_str(),
                    ok ? "PASS" : "FAIL", secs, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
