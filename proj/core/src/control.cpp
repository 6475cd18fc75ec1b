#include "orcd/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orcd {

ControlPlane::ControlPlane(const Topology& topology, ControlConfig config, RngStream loss_rng)
    : topology_(&topology),
      config_(config),
      loss_rng_(loss_rng),
      link_prob_([t = &topology](NodeId i, NodeId j) { return t->links()(i, j); }),
      n_(topology.node_count()),
      nd_(topology.destinations().size()) {
    if (config_.tc_multiple < 1) throw std::invalid_argument("ControlPlane: tc_multiple must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(n_ + 1) * nd_;
    virtual_value_.assign(cells, kPoison);
    virtual_succ_.assign(cells, 0.0);
    virtual_priority_.assign(cells, {});
    qbar_.assign(cells, 0.0);
    qbar_sum_.assign(cells, 0.0);
    qbar_count_.assign(cells, 0);
    actual_value_.assign(cells, kPoison);
    best_forwarders_.assign(cells, {});

    estimates_.assign(n_ + 1, {});
    actual_estimates_.assign(n_ + 1, {});
    for (NodeId i = 1; i <= n_; ++i) {
        estimates_[i].assign(topology.neighbors(i).size() * nd_, {});
        actual_estimates_[i].assign(topology.neighbors(i).size() * nd_, kPoison);
    }

    for (std::size_t d = 0; d < nd_; ++d) {
        const NodeId dest = topology.destinations()[d];
        const std::size_t cell = static_cast<std::size_t>(dest) * nd_ + d;
        virtual_value_[cell] = 0.0;
        virtual_succ_[cell] = 1.0;
        actual_value_[cell] = 0.0;
    }
}

void ControlPlane::set_link_provider(std::function<double(NodeId, NodeId)> provider) {
    link_prob_ = std::move(provider);
}

std::size_t ControlPlane::dest_index(NodeId dest) const {
    const auto& dests = topology_->destinations();
    for (std::size_t d = 0; d < dests.size(); ++d)
        if (dests[d] == dest) return d;
    throw std::invalid_argument("ControlPlane: unknown destination");
}

std::size_t ControlPlane::nbr_index(NodeId i, NodeId k) const {
    const auto& nbrs = topology_->neighbors(i);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), k);
    if (it == nbrs.end() || *it != k) throw std::invalid_argument("ControlPlane: not a neighbor");
    return static_cast<std::size_t>(it - nbrs.begin());
}

double ControlPlane::expiry_checked(const Estimate& e) const {
    if (!e.present) return kPoison;
    if (epoch_ > e.received_epoch + static_cast<std::uint64_t>(config_.expiry_epochs)) return kPoison;
    return e.value;
}

double ControlPlane::expiry_checked_backlog(const Estimate& e) const {
    if (!e.present) return kPoison;
    if (epoch_ > e.received_epoch + static_cast<std::uint64_t>(config_.expiry_epochs)) return kPoison;
    return e.backlog;
}

double ControlPlane::cross_load(NodeId i, std::size_t dest_idx) const {
    double load = 0.0;
    for (std::size_t d = 0; d < nd_; ++d) {
        if (d == dest_idx) continue;
        const std::size_t cell = static_cast<std::size_t>(i) * nd_ + d;
        if (qbar_[cell] <= 0.0) continue;
        if (virtual_succ_[cell] <= 0.0) return kPoison;
        load += qbar_[cell] / virtual_succ_[cell];
    }
    return load;
}

void ControlPlane::recompute_node(NodeId i) {
    const auto& nbrs = topology_->neighbors(i);
    std::vector<Candidate> cands;
    cands.reserve(nbrs.size());
    for (std::size_t d = 0; d < nd_; ++d) {
        const NodeId dest = topology_->destinations()[d];
        if (i == dest) continue;
        const std::size_t cell = static_cast<std::size_t>(i) * nd_ + d;
        cands.clear();
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const Estimate& e = estimates_[i][k * nd_ + d];
            cands.push_back({nbrs[k], expiry_checked(e), link_prob_(i, nbrs[k])});
        }
        const CongestionUpdate upd =
            partial_diversity_value(cands, config_.max_forwarders, qbar_[cell], cross_load(i, d));
        virtual_value_[cell] = upd.value;
        virtual_succ_[cell] = upd.success_prob;
        virtual_priority_[cell] = upd.priority;
    }
}

void ControlPlane::boundary() {
    // Queue averages: arithmetic mean of the samples taken at the control
    // epochs of the cycle that just ended.
    const std::size_t cells = qbar_.size();
    for (std::size_t c = 0; c < cells; ++c) {
        qbar_[c] = qbar_count_[c] > 0 ? qbar_sum_[c] / qbar_count_[c] : 0.0;
        qbar_sum_[c] = 0.0;
        qbar_count_[c] = 0;
    }
    force_snapshot();
}

void ControlPlane::force_snapshot() {
    actual_value_ = virtual_value_;
    for (NodeId i = 1; i <= n_; ++i) {
        const auto& nbrs = topology_->neighbors(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k)
            for (std::size_t d = 0; d < nd_; ++d)
                actual_estimates_[i][k * nd_ + d] = expiry_checked(estimates_[i][k * nd_ + d]);
    }
    // Best-forwarder sets for the partial-diversity policy, from the frozen
    // estimates and the fresh queue averages.
    if (config_.max_forwarders != kUnboundedForwarders) {
        std::vector<Candidate> cands;
        for (NodeId i = 1; i <= n_; ++i) {
            const auto& nbrs = topology_->neighbors(i);
            for (std::size_t d = 0; d < nd_; ++d) {
                const NodeId dest = topology_->destinations()[d];
                const std::size_t cell = static_cast<std::size_t>(i) * nd_ + d;
                if (i == dest) {
                    best_forwarders_[cell].clear();
                    continue;
                }
                cands.clear();
                for (std::size_t k = 0; k < nbrs.size(); ++k)
                    cands.push_back({nbrs[k], actual_estimates_[i][k * nd_ + d],
                                     link_prob_(i, nbrs[k])});
                best_forwarders_[cell] =
                    partial_diversity_value(cands, config_.max_forwarders, qbar_[cell], cross_load(i, d))
                        .priority;
            }
        }
    }
}

void ControlPlane::run_epoch(const std::function<double(NodeId, NodeId)>& queue_len,
                             std::vector<ControlPacket>* trace) {
    // Sample queues first: the boundary average includes this epoch's sample.
    for (NodeId i = 1; i <= n_; ++i) {
        for (std::size_t d = 0; d < nd_; ++d) {
            const std::size_t cell = static_cast<std::size_t>(i) * nd_ + d;
            qbar_sum_[cell] += queue_len(i, topology_->destinations()[d]);
            qbar_count_[cell] += 1;
        }
    }
    if (epoch_ % static_cast<std::uint64_t>(config_.tc_multiple) == 0) boundary();

    // Synchronous exchange: every node recomputes from the estimates received
    // at earlier epochs, then broadcasts; deliveries become visible next epoch.
    for (NodeId i = 1; i <= n_; ++i) recompute_node(i);

    for (NodeId i = 1; i <= n_; ++i) {
        for (std::size_t d = 0; d < nd_; ++d) {
            const NodeId dest = topology_->destinations()[d];
            const std::size_t cell = static_cast<std::size_t>(i) * nd_ + d;
            ControlPacket packet;
            packet.sender = i;
            packet.commodity = dest;
            packet.epoch = epoch_;
            const double own = virtual_value_[cell];
            const double backlog = queue_len(i, dest);
            for (NodeId j : topology_->neighbors(i)) {
                const double advertised =
                    config_.poison_reverse ? poison_filter(j, own, virtual_priority_[cell]) : own;
                const std::uint64_t wire = encode_fixed32(advertised);
                packet.advertised.emplace_back(j, wire);
                if (config_.loss_prob > 0.0 && loss_rng_.bernoulli(config_.loss_prob)) continue;
                // Receiver j keeps estimates only for its own forwarding
                // candidates, i.e. when i is a neighbor of j.
                const auto& jn = topology_->neighbors(j);
                if (!std::binary_search(jn.begin(), jn.end(), i)) continue;
                Estimate& slot = estimates_[j][nbr_index(j, i) * nd_ + d];
                slot.value = decode_fixed32(wire);
                slot.backlog = backlog;
                slot.received_epoch = epoch_;
                slot.present = true;
            }
            if (trace) trace->push_back(std::move(packet));
        }
    }
    ++epoch_;
}

double ControlPlane::virtual_value(NodeId i, NodeId dest) const {
    return virtual_value_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

const std::vector<NodeId>& ControlPlane::virtual_priority(NodeId i, NodeId dest) const {
    return virtual_priority_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

double ControlPlane::virtual_success_prob(NodeId i, NodeId dest) const {
    return virtual_succ_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

double ControlPlane::actual_value(NodeId i, NodeId dest) const {
    return actual_value_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

double ControlPlane::actual_estimate(NodeId i, NodeId k, NodeId dest) const {
    return actual_estimates_[i][nbr_index(i, k) * nd_ + dest_index(dest)];
}

const std::vector<NodeId>& ControlPlane::best_forwarders(NodeId i, NodeId dest) const {
    return best_forwarders_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

double ControlPlane::live_estimate(NodeId i, NodeId k, NodeId dest) const {
    return expiry_checked(estimates_[i][nbr_index(i, k) * nd_ + dest_index(dest)]);
}

double ControlPlane::backlog_estimate(NodeId i, NodeId k, NodeId dest) const {
    return expiry_checked_backlog(estimates_[i][nbr_index(i, k) * nd_ + dest_index(dest)]);
}

double ControlPlane::queue_average(NodeId i, NodeId dest) const {
    return qbar_[static_cast<std::size_t>(i) * nd_ + dest_index(dest)];
}

ControlPlane run_computation_cycle(const Topology& topology, std::span<const double> frozen_queue,
                                   NodeId dest, const ControlConfig& config, std::uint64_t seed,
                                   int rounds) {
    if (topology.destinations().size() != 1 || topology.destinations()[0] != dest)
        throw std::invalid_argument("run_computation_cycle: topology must carry the single destination");
    if (frozen_queue.size() != static_cast<std::size_t>(topology.node_count()) + 1)
        throw std::invalid_argument("run_computation_cycle: queue vector must be 1-based of size D+1");
    ControlPlane plane(topology, config, derive_stream(seed, stream_purpose::kControlLoss, 0));
    const auto queue_len = [&](NodeId i, NodeId) { return frozen_queue[static_cast<std::size_t>(i)]; };
    for (int r = 0; r < rounds; ++r) plane.run_epoch(queue_len);
    plane.force_snapshot();
    return plane;
}

}  // namespace orcd
