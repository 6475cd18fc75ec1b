#include "orcd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orcd/simplex.hpp"

namespace orcd {

LyapunovConfig LyapunovConfig::from_topology(const Topology& topology) {
    double p_min = 1.0;
    const int n = topology.node_count();
    for (NodeId i = 1; i <= n; ++i)
        for (NodeId j : topology.neighbors(i)) p_min = std::min(p_min, topology.links()(i, j));
    return {p_min, 1.0 + 1.0 / p_min};
}

double f_weight(int m, int n, const LyapunovConfig& config) {
    if (n <= 0) throw std::invalid_argument("f_weight: class size must be positive");
    if (m < 0) throw std::invalid_argument("f_weight: cumulative count must be nonnegative");
    return 1.0 / (std::pow(config.K, m) * (std::pow(config.K, n) - 1.0));
}

RankOrdering rank_ordering_from_state(const Topology& topology, std::span<const double> queue,
                                      NodeId dest) {
    const FixedPointResult fp = solve_fixed_point(topology, queue, CostVariant::kQueue, dest);
    struct Ranked {
        NodeId id;
        double v;
    };
    std::vector<Ranked> ranked;
    std::vector<NodeId> poisoned;
    for (NodeId i = 1; i <= topology.node_count(); ++i) {
        if (i == dest) continue;
        if (std::isinf(fp.value[i]))
            poisoned.push_back(i);
        else
            ranked.push_back({i, fp.value[i]});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.v != b.v) return a.v < b.v;
        return a.id < b.id;
    });

    RankOrdering out;
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        if (k == 0 || !same(ranked[k].v, ranked[k - 1].v)) out.classes.emplace_back();
        out.classes.back().push_back(ranked[k].id);
    }
    if (!poisoned.empty()) {
        out.classes.push_back(std::move(poisoned));
        out.poisoned_tail = true;
    }
    return out;
}

bool is_path_connected(const RankOrdering& ordering, const Topology& topology, NodeId dest) {
    const int n = topology.node_count();
    std::vector<char> earlier(n + 1, 0);  // membership in C^{k-1}
    for (const auto& cls : ordering.classes) {
        for (NodeId i : cls) {
            // Reachability of dest from i with intermediate hops in C^{k-1}.
            std::vector<char> seen(n + 1, 0);
            std::vector<NodeId> stack{i};
            seen[i] = 1;
            bool found = false;
            while (!stack.empty() && !found) {
                const NodeId u = stack.back();
                stack.pop_back();
                for (NodeId v : topology.neighbors(u)) {
                    if (v == dest) {
                        found = true;
                        break;
                    }
                    if (!seen[v] && earlier[v]) {
                        seen[v] = 1;
                        stack.push_back(v);
                    }
                }
            }
            if (!found) return false;
        }
        for (NodeId i : cls) earlier[i] = 1;
    }
    return true;
}

double lyapunov_value(std::span<const double> queue, const RankOrdering& ordering,
                      const LyapunovConfig& config) {
    double total = 0.0;
    int before = 0;
    for (const auto& cls : ordering.classes) {
        double mass = 0.0;
        for (NodeId i : cls) mass += queue[static_cast<std::size_t>(i)];
        total += f_weight(before, static_cast<int>(cls.size()), config) * mass * mass;
        before += static_cast<int>(cls.size());
    }
    return total;
}

double u_f(NodeId k, std::span<const double> queue, const RankOrdering& ordering,
           const LyapunovConfig& config) {
    int before = 0;
    for (const auto& cls : ordering.classes) {
        const bool member = std::find(cls.begin(), cls.end(), k) != cls.end();
        if (member) {
            double mass = 0.0;
            for (NodeId i : cls) mass += queue[static_cast<std::size_t>(i)];
            return f_weight(before, static_cast<int>(cls.size()), config) * mass;
        }
        before += static_cast<int>(cls.size());
    }
    throw std::invalid_argument("u_f: node not present in the rank ordering");
}

std::vector<double> lyapunov_series(const Topology& topology, const MetricsLog& metrics,
                                    NodeId dest, const LyapunovConfig& config,
                                    std::int64_t from_slot) {
    const int n = topology.node_count();
    std::vector<double> out;
    const std::int64_t slots = static_cast<std::int64_t>(metrics.total_backlog.size());
    out.reserve(static_cast<std::size_t>(slots - from_slot));
    std::vector<double> q(n + 1, 0.0);
    for (std::int64_t t = from_slot; t < slots; ++t) {
        for (NodeId i = 1; i <= n; ++i) q[i] = metrics.node_backlog_at(t, i);
        const RankOrdering ordering = rank_ordering_from_state(topology, q, dest);
        out.push_back(lyapunov_value(q, ordering, config));
    }
    return out;
}

DriftEstimate drift_estimate(std::span<const double> total_backlog,
                             std::span<const double> lyapunov, int num_bins,
                             std::size_t min_per_bin) {
    if (total_backlog.size() != lyapunov.size() || total_backlog.size() < 2)
        throw std::invalid_argument("drift_estimate: series mismatch or too short");
    const std::size_t samples = total_backlog.size() - 1;

    std::vector<std::size_t> order(samples);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return total_backlog[a] < total_backlog[b];
    });

    DriftEstimate out;
    out.bins.reserve(num_bins);
    for (int b = 0; b < num_bins; ++b) {
        const std::size_t lo = samples * b / num_bins;
        const std::size_t hi = samples * (b + 1) / num_bins;
        if (hi <= lo) continue;
        DriftBin bin;
        bin.count = hi - lo;
        double sum_x = 0.0, sum_y = 0.0;
        for (std::size_t s = lo; s < hi; ++s) {
            const std::size_t t = order[s];
            sum_x += total_backlog[t];
            sum_y += lyapunov[t + 1] - lyapunov[t];
        }
        bin.center = sum_x / static_cast<double>(bin.count);
        bin.mean_drift = sum_y / static_cast<double>(bin.count);
        bin.sufficient = bin.count >= min_per_bin;
        out.bins.push_back(bin);
    }

    // Affine bound fit over the raw samples: drift = B - eps * sum(Q).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        const double x = total_backlog[t];
        const double y = lyapunov[t + 1] - lyapunov[t];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nn = static_cast<double>(samples);
    const double denom = nn * sxx - sx * sx;
    if (denom > 0.0) {
        const double slope = (nn * sxy - sx * sy) / denom;
        out.b_hat = (sy - slope * sx) / nn;
        out.eps_hat = -slope;
    }
    return out;
}

namespace {

struct ChoiceVar {
    NodeId transmitter;
    double subset_prob;
    NodeId target;  // == transmitter means retain
};

}  // namespace

double stability_region_max_rate(const Topology& topology, std::span<const double> lambda_dir,
                                 NodeId dest, double tol) {
    const int n = topology.node_count();
    if (n > 8)
        throw OracleSizeError("stability oracle: node count above 8 makes subset enumeration infeasible");
    if (lambda_dir.size() != static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("stability_region_max_rate: direction must be 1-based of size D+1");
    const TopologyReport report = validate_topology(topology);
    if (!report.valid())
        throw std::invalid_argument("stability_region_max_rate: disconnected topology: " + report.to_string());

    bool any_positive = false;
    for (NodeId i = 1; i <= n; ++i)
        if (i != dest && lambda_dir[i] > 0.0) any_positive = true;
    if (!any_positive) return kPoison;

    // Enumerate (transmitter, nonempty forwarder set, choice) variables once.
    std::vector<ChoiceVar> vars;
    std::vector<LpRow> distribution_rows;
    for (NodeId i = 1; i <= n; ++i) {
        if (i == dest) continue;
        const auto& nbrs = topology.neighbors(i);
        const std::size_t deg = nbrs.size();
        for (std::uint32_t mask = 1; mask < (1u << deg); ++mask) {
            std::vector<NodeId> subset;
            for (std::size_t b = 0; b < deg; ++b)
                if (mask & (1u << b)) subset.push_back(nbrs[b]);
            const double prob = subset_probability(topology, i, subset);
            if (prob <= 0.0) continue;
            LpRow dist;
            dist.is_equality = true;
            dist.rhs = 1.0;
            for (NodeId j : subset) {
                dist.terms.emplace_back(static_cast<int>(vars.size()), 1.0);
                vars.push_back({i, prob, j});
            }
            dist.terms.emplace_back(static_cast<int>(vars.size()), 1.0);
            vars.push_back({i, prob, i});  // retain
            distribution_rows.push_back(std::move(dist));
        }
    }

    // Flow-balance coefficients: expected out minus expected in per node.
    std::vector<LpRow> balance_template(n + 1);
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const auto& cv = vars[v];
        if (cv.target == cv.transmitter) continue;
        balance_template[cv.transmitter].terms.emplace_back(static_cast<int>(v), cv.subset_prob);
        if (cv.target != dest)
            balance_template[cv.target].terms.emplace_back(static_cast<int>(v), -cv.subset_prob);
    }

    const auto feasible = [&](double theta) {
        std::vector<LpRow> rows = distribution_rows;
        for (NodeId k = 1; k <= n; ++k) {
            if (k == dest) continue;
            LpRow row = balance_template[k];
            row.is_equality = false;
            row.rhs = theta * lambda_dir[k];
            rows.push_back(std::move(row));
        }
        return lp_feasible(static_cast<int>(vars.size()), rows, 1e-9);
    };

    double hi = kPoison;
    for (NodeId i = 1; i <= n; ++i)
        if (i != dest && lambda_dir[i] > 0.0) hi = std::min(hi, 1.0 / lambda_dir[i]);
    if (feasible(hi)) return hi;
    double lo = 0.0;
    for (int iter = 0; iter < 64 && hi - lo > tol * 1e-3; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

StabilityVerdict stability_verdict(std::span<const double> total_backlog) {
    const std::size_t len = total_backlog.size();
    if (len < kVerdictMinSlots)
        throw std::invalid_argument("stability_verdict: series shorter than the minimum horizon");

    const auto mean = [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t t = lo; t < hi; ++t) s += total_backlog[t];
        return s / static_cast<double>(hi - lo);
    };
    StabilityVerdict verdict;
    verdict.mean_q3 = mean(len / 2, 3 * len / 4);
    verdict.mean_q4 = mean(3 * len / 4, len);

    // Least-squares slope over the second half.
    const std::size_t lo = len / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = lo; t < len; ++t) {
        const double x = static_cast<double>(t - lo);
        sx += x;
        sy += total_backlog[t];
        sxx += x * x;
        sxy += x * total_backlog[t];
    }
    const double nn = static_cast<double>(len - lo);
    const double denom = nn * sxx - sx * sx;
    verdict.slope = denom > 0.0 ? (nn * sxy - sx * sy) / denom : 0.0;

    const bool means_flat = std::abs(verdict.mean_q4 - verdict.mean_q3) <= 0.1 * verdict.mean_q3;
    verdict.bounded = means_flat && verdict.slope <= 1e-4;
    return verdict;
}

}  // namespace orcd
