#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "orcd/control.hpp"
#include "orcd/link_estimator.hpp"
#include "orcd/mac.hpp"
#include "orcd/policies.hpp"
#include "orcd/sim.hpp"
#include "orcd/topology.hpp"

namespace orcd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Source node 1 feeds two branches towards a single destination: a short
/// high-quality branch through node 2 (whose direct link is the capacity
/// bottleneck) and a longer branch 3 -> 4. A chain of `hole_size` nodes hangs
/// off node 2 and rejoins at node 4; its detour is strictly worse in expected
/// transmissions, so shortest-path policies never use it while backpressure
/// wanders into it. Node ids: 1 source, 2 short relay, 3-4 long branch,
/// 5 destination, 6.. the hole chain.
struct CanonicalParams {
    int hole_size = 2;
    double source_to_short = 0.8;
    double source_to_long = 0.8;
    double short_to_dest = 0.5;
    double long_hop = 0.8;
    double hole_hop = 0.8;
};

struct GridParams {
    int rows = 4;
    int cols = 4;
    double p_adjacent = 0.8;
    double p_diagonal = 0.0;  // 0 disables diagonal links
    NodeId destination = 1;
    std::vector<std::tuple<NodeId, NodeId, double>> overrides;  // symmetric link overrides
};

struct ChainParams {
    int length = 3;
    double p = 0.8;
};

struct TopologySpec {
    enum class Kind { kMatrix, kCanonical, kGrid, kChain };
    Kind kind = Kind::kMatrix;
    std::vector<std::vector<double>> matrix;  // row-major D x D
    std::vector<NodeId> destinations;         // matrix kind only
    CanonicalParams canonical;
    GridParams grid;
    ChainParams chain;
};

Topology generate_canonical(const CanonicalParams& params);
Topology generate_grid(const GridParams& params);
Topology generate_chain(const ChainParams& params);
Topology build_topology(const TopologySpec& spec);

struct ScenarioConfig {
    int schema = 1;
    std::string name = "scenario";
    TopologySpec topology;
    PolicyKind policy = PolicyKind::kDorcd;
    std::size_t policy_m = 4;  // partial-diversity cap (pdorcd)
    SimParams sim;
    MacConfig mac;
    ControlConfig control;
    EstimatorConfig estimator;
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = "out";
    bool write_backlog_series = true;
};

/// Parses the versioned JSON scenario format; throws ConfigError with a
/// description on malformed input.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);

/// Canonical serialization: parse(serialize(c)) == c field-for-field, and the
/// byte string is stable (sorted keys), so it doubles as the hash input.
std::string serialize_config(const ScenarioConfig& config);

/// Human-readable problems; empty means the config is runnable.
std::vector<std::string> validate_config(const ScenarioConfig& config);

/// FNV-1a over the canonical serialization with seeds stripped, so every
/// (row, seed) in emitted CSVs identifies its scenario.
std::uint64_t scenario_hash(const ScenarioConfig& config);

enum class SweepParam { kLambda, kHoleSize, kM, kTcMultiple };

struct SweepSpec {
    SweepParam param = SweepParam::kLambda;
    std::vector<double> values;
};

/// Parses "name=v1,v2,..." with name in {lambda, N, M, Tc_multiple}.
SweepSpec parse_sweep(const std::string& text);
std::string to_string(SweepParam param);

/// Returns the config with the swept parameter replaced. lambda replaces
/// every traffic rate; N requires the canonical generator.
ScenarioConfig apply_sweep_value(const ScenarioConfig& config, SweepParam param, double value);

}  // namespace orcd
