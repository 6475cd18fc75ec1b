#include "orcd/topology.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace orcd {

void LinkMatrix::set(NodeId i, NodeId j, double p) {
    if (!valid_node(i) || !valid_node(j)) throw std::invalid_argument("LinkMatrix::set: node id out of range");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("LinkMatrix::set: probability out of [0,1]");
    if (i == j && p != 1.0) throw std::invalid_argument("LinkMatrix::set: diagonal entries are fixed at 1");
    p_[index(i, j)] = p;
}

bool ForwarderSet::contains(NodeId k) const {
    return std::binary_search(receivers.begin(), receivers.end(), k);
}

Topology::Topology(LinkMatrix links, std::vector<NodeId> destinations)
    : links_(std::move(links)), destinations_(std::move(destinations)) {
    if (destinations_.empty()) throw std::invalid_argument("Topology: at least one destination required");
    std::sort(destinations_.begin(), destinations_.end());
    destinations_.erase(std::unique(destinations_.begin(), destinations_.end()), destinations_.end());
    for (NodeId d : destinations_)
        if (!links_.valid_node(d)) throw std::invalid_argument("Topology: destination id out of range");

    neighbors_.assign(links_.size() + 1, {});
    for (NodeId i = 1; i <= links_.size(); ++i)
        for (NodeId j = 1; j <= links_.size(); ++j)
            if (j != i && links_(i, j) > 0.0) neighbors_[i].push_back(j);
}

bool Topology::is_destination(NodeId i) const {
    return std::binary_search(destinations_.begin(), destinations_.end(), i);
}

const std::vector<NodeId>& Topology::neighbors(NodeId i) const {
    if (!links_.valid_node(i)) throw std::invalid_argument("Topology::neighbors: node id out of range");
    return neighbors_[static_cast<std::size_t>(i)];
}

double subset_probability(const Topology& topology, NodeId i, const std::vector<NodeId>& subset) {
    const auto& nbrs = topology.neighbors(i);
    for (NodeId k : subset)
        if (!std::binary_search(nbrs.begin(), nbrs.end(), k))
            throw std::invalid_argument("subset_probability: set contains a non-neighbor");
    double prob = 1.0;
    for (NodeId j : nbrs) {
        const bool in = std::find(subset.begin(), subset.end(), j) != subset.end();
        prob *= in ? topology.links()(i, j) : 1.0 - topology.links()(i, j);
    }
    return prob;
}

ForwarderSet sample_forwarder_set(const Topology& topology, NodeId i, RngStream& rng) {
    ForwarderSet out;
    out.transmitter = i;
    for (NodeId j : topology.neighbors(i))
        if (rng.bernoulli(topology.links()(i, j))) out.receivers.push_back(j);
    return out;
}

bool TopologyReport::valid() const {
    if (!oversized_fanout.empty()) return false;
    for (const auto& group : unreachable)
        if (!group.empty()) return false;
    return true;
}

std::string TopologyReport::to_string() const {
    std::ostringstream os;
    if (valid()) {
        os << "topology ok";
        return os.str();
    }
    for (std::size_t d = 0; d < unreachable.size(); ++d) {
        if (unreachable[d].empty()) continue;
        os << "destination group " << d << ": no positive-probability path from nodes {";
        for (std::size_t k = 0; k < unreachable[d].size(); ++k) os << (k ? "," : "") << unreachable[d][k];
        os << "}\n";
    }
    if (!oversized_fanout.empty()) {
        os << "fan-out above " << kMaxExactFanout << " (exact subset enumeration infeasible) at nodes {";
        for (std::size_t k = 0; k < oversized_fanout.size(); ++k) os << (k ? "," : "") << oversized_fanout[k];
        os << "}\n";
    }
    return os.str();
}

TopologyReport validate_topology(const Topology& topology) {
    TopologyReport report;
    const int n = topology.node_count();

    // Reverse reachability: nodes from which the destination can be reached
    // along directed positive links.
    for (NodeId dest : topology.destinations()) {
        std::vector<char> reaches(n + 1, 0);
        reaches[dest] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (NodeId i = 1; i <= n; ++i) {
                if (reaches[i]) continue;
                for (NodeId j : topology.neighbors(i)) {
                    if (reaches[j]) {
                        reaches[i] = 1;
                        changed = true;
                        break;
                    }
                }
            }
        }
        std::vector<NodeId> missing;
        for (NodeId i = 1; i <= n; ++i)
            if (!reaches[i]) missing.push_back(i);
        report.unreachable.push_back(std::move(missing));
    }

    for (NodeId i = 1; i <= n; ++i)
        if (topology.neighbors(i).size() > kMaxExactFanout) report.oversized_fanout.push_back(i);
    return report;
}

}  // namespace orcd
