#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "orcd/rng.hpp"

namespace orcd {

/// Node ids are 1-based and dense: the network is {1, ..., D}.
using NodeId = int;

/// Fan-out bound for exact subset enumeration; larger neighborhoods are
/// rejected by validate_topology with a diagnostic.
constexpr std::size_t kMaxExactFanout = 25;

/// D x D matrix of link delivery probabilities. p(i,i) == 1 by convention.
class LinkMatrix {
  public:
    LinkMatrix() : size_(0) {}

    explicit LinkMatrix(int node_count)
        : size_(node_count), p_((node_count + 1) * (node_count + 1), 0.0) {
        for (int i = 1; i <= node_count; ++i) set(i, i, 1.0);
    }

    int size() const { return size_; }

    double operator()(NodeId i, NodeId j) const { return p_[index(i, j)]; }

    void set(NodeId i, NodeId j, double p);
    void set_symmetric(NodeId i, NodeId j, double p) {
        set(i, j, p);
        set(j, i, p);
    }

    bool valid_node(NodeId i) const { return i >= 1 && i <= size_; }

  private:
    std::size_t index(NodeId i, NodeId j) const {
        return static_cast<std::size_t>(i) * (size_ + 1) + static_cast<std::size_t>(j);
    }

    int size_;
    std::vector<double> p_;
};

/// The random set of receivers of one broadcast transmission.
struct ForwarderSet {
    NodeId transmitter = 0;
    std::vector<NodeId> receivers;  // sorted ascending, subset of neighbors(transmitter)

    bool contains(NodeId k) const;
};

/// Immutable after construction; neighbor lists are precomputed.
class Topology {
  public:
    Topology() = default;
    Topology(LinkMatrix links, std::vector<NodeId> destinations);

    int node_count() const { return links_.size(); }
    const LinkMatrix& links() const { return links_; }
    const std::vector<NodeId>& destinations() const { return destinations_; }
    bool is_destination(NodeId i) const;

    /// {j != i : p_ij > 0}, sorted ascending. Throws on invalid id.
    const std::vector<NodeId>& neighbors(NodeId i) const;

  private:
    LinkMatrix links_;
    std::vector<NodeId> destinations_;
    std::vector<std::vector<NodeId>> neighbors_;
};

/// P(S_i = S) under independent link realizations:
///   prod_{k in S} p_ik * prod_{l in N(i) \ S} (1 - p_il).
/// Throws if S is not a subset of neighbors(i).
double subset_probability(const Topology& topology, NodeId i, const std::vector<NodeId>& subset);

/// Draws a forwarder set; each neighbor is included independently w.p. p_ij.
ForwarderSet sample_forwarder_set(const Topology& topology, NodeId i, RngStream& rng);

struct TopologyReport {
    // Per destination (aligned with topology.destinations()): nodes with no
    // positive-probability directed path to that destination.
    std::vector<std::vector<NodeId>> unreachable;
    // Nodes whose fan-out exceeds kMaxExactFanout.
    std::vector<NodeId> oversized_fanout;

    bool valid() const;
    std::string to_string() const;
};

TopologyReport validate_topology(const Topology& topology);

}  // namespace orcd
