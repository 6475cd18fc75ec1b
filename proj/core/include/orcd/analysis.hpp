#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "orcd/congestion.hpp"
#include "orcd/sim.hpp"
#include "orcd/topology.hpp"

namespace orcd {

struct OracleSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constants of the piecewise quadratic: K = 1 + 1/p_min over the positive
/// links of the network.
struct LyapunovConfig {
    double p_min = 0.5;
    double K = 3.0;

    static LyapunovConfig from_topology(const Topology& topology);
};

/// f(m, n) = 1 / (K^m (K^n - 1)), m >= 0, n > 0; strictly decreasing in both
/// arguments. Throws for n <= 0.
double f_weight(int m, int n, const LyapunovConfig& config);

/// Ordered partition of the non-destination nodes. Nodes with no finite
/// centralized congestion value land in a flagged terminal class.
struct RankOrdering {
    std::vector<std::vector<NodeId>> classes;
    bool poisoned_tail = false;
};

/// Classes ordered by ascending centralized fixed-point value V*(Q) (queue
/// cost variant); nodes with equal V* merge into one class.
RankOrdering rank_ordering_from_state(const Topology& topology, std::span<const double> queue,
                                      NodeId dest);

/// True iff every node of class C_k reaches the destination through a chain
/// of positive links whose intermediate nodes lie in strictly earlier classes.
bool is_path_connected(const RankOrdering& ordering, const Topology& topology, NodeId dest);

/// L_f(Q, R) = sum_i f(|C^{i-1}|, |C_i|) * Q_{C_i}^2.
double lyapunov_value(std::span<const double> queue, const RankOrdering& ordering,
                      const LyapunovConfig& config);

/// U_f(k, Q) = f(|C^{i-1}|, |C_i|) * Q_{C_i} for k in C_i. Throws when k is
/// not a member of the ordering.
double u_f(NodeId k, std::span<const double> queue, const RankOrdering& ordering,
           const LyapunovConfig& config);

/// L*_f along a recorded trajectory: per slot, the rank ordering of the
/// current backlog vector selects the piece.
std::vector<double> lyapunov_series(const Topology& topology, const MetricsLog& metrics,
                                    NodeId dest, const LyapunovConfig& config,
                                    std::int64_t from_slot = 0);

struct DriftBin {
    double center = 0.0;      // mean total backlog of the bin
    double mean_drift = 0.0;  // mean one-slot change of L*_f
    std::size_t count = 0;
    bool sufficient = true;
};

struct DriftEstimate {
    std::vector<DriftBin> bins;
    double b_hat = 0.0;    // intercept of the affine bound fit
    double eps_hat = 0.0;  // negated slope; positive under a stabilizing policy
};

/// Bins one-slot drifts of `lyapunov` by total backlog into `num_bins`
/// equal-mass bins and fits drift ~ B - eps * sum(Q) by least squares over
/// the samples.
DriftEstimate drift_estimate(std::span<const double> total_backlog,
                             std::span<const double> lyapunov, int num_bins = 20,
                             std::size_t min_per_bin = 50);

/// Largest theta such that traffic theta * lambda_dir is supportable by some
/// stationary randomized policy choosing a next hop (or retain) per realized
/// forwarder set, under per-node unit service and nonnegative flow balance.
/// Solved by bisection over a flow-balance feasibility LP whose variables are
/// the per-(transmitter, forwarder set) hand-off probabilities weighted by
/// subset probabilities. Requires node_count <= 8 (subset enumeration);
/// throws OracleSizeError beyond. Returns +inf for a zero direction.
double stability_region_max_rate(const Topology& topology, std::span<const double> lambda_dir,
                                 NodeId dest, double tol = 1e-9);

struct StabilityVerdict {
    bool bounded = false;
    double slope = 0.0;  // packets per slot, least squares over the second half
    double mean_q3 = 0.0;
    double mean_q4 = 0.0;
};

constexpr std::size_t kVerdictMinSlots = 100000;

/// Window-mean comparison plus slope test over a post-warm-up total-backlog
/// series. Throws when the series is shorter than kVerdictMinSlots.
StabilityVerdict stability_verdict(std::span<const double> total_backlog);

}  // namespace orcd
