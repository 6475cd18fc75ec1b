#include "orcd/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace orcd {

using nlohmann::json;

Topology generate_canonical(const CanonicalParams& params) {
    if (params.hole_size < 1) throw ConfigError("canonical generator: hole_size must be >= 1");
    const int n = 5 + params.hole_size;
    const NodeId dest = 5;
    LinkMatrix links(n);
    links.set_symmetric(1, 2, params.source_to_short);
    links.set_symmetric(1, 3, params.source_to_long);
    links.set_symmetric(2, dest, params.short_to_dest);
    links.set_symmetric(3, 4, params.long_hop);
    links.set_symmetric(4, dest, params.long_hop);
    NodeId prev = 2;
    for (int h = 0; h < params.hole_size; ++h) {
        const NodeId hole = 6 + h;
        links.set_symmetric(prev, hole, params.hole_hop);
        prev = hole;
    }
    links.set_symmetric(prev, 4, params.hole_hop);
    return Topology(links, {dest});
}

Topology generate_grid(const GridParams& params) {
    if (params.rows < 1 || params.cols < 1) throw ConfigError("grid generator: bad dimensions");
    const int n = params.rows * params.cols;
    const auto id = [&](int r, int c) { return static_cast<NodeId>(r * params.cols + c + 1); };
    LinkMatrix links(n);
    for (int r = 0; r < params.rows; ++r) {
        for (int c = 0; c < params.cols; ++c) {
            if (c + 1 < params.cols) links.set_symmetric(id(r, c), id(r, c + 1), params.p_adjacent);
            if (r + 1 < params.rows) links.set_symmetric(id(r, c), id(r + 1, c), params.p_adjacent);
            if (params.p_diagonal > 0.0 && r + 1 < params.rows) {
                if (c + 1 < params.cols) links.set_symmetric(id(r, c), id(r + 1, c + 1), params.p_diagonal);
                if (c > 0) links.set_symmetric(id(r, c), id(r + 1, c - 1), params.p_diagonal);
            }
        }
    }
    for (const auto& [a, b, p] : params.overrides) links.set_symmetric(a, b, p);
    if (params.destination < 1 || params.destination > n)
        throw ConfigError("grid generator: destination outside the grid");
    return Topology(links, {params.destination});
}

Topology generate_chain(const ChainParams& params) {
    if (params.length < 2) throw ConfigError("chain generator: need at least 2 nodes");
    LinkMatrix links(params.length);
    for (int i = 1; i < params.length; ++i) links.set_symmetric(i, i + 1, params.p);
    return Topology(links, {params.length});
}

Topology build_topology(const TopologySpec& spec) {
    switch (spec.kind) {
        case TopologySpec::Kind::kCanonical: return generate_canonical(spec.canonical);
        case TopologySpec::Kind::kGrid: return generate_grid(spec.grid);
        case TopologySpec::Kind::kChain: return generate_chain(spec.chain);
        case TopologySpec::Kind::kMatrix: break;
    }
    const int n = static_cast<int>(spec.matrix.size());
    if (n == 0) throw ConfigError("topology matrix is empty");
    LinkMatrix links(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(spec.matrix[i].size()) != n) throw ConfigError("topology matrix is not square");
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = spec.matrix[i][j];
            if (p < 0.0 || p > 1.0) throw ConfigError("topology matrix entry outside [0,1]");
            if (p > 0.0) links.set(i + 1, j + 1, p);
        }
    }
    if (spec.destinations.empty()) throw ConfigError("topology: destinations missing");
    return Topology(links, spec.destinations);
}

namespace {

json topology_to_json(const TopologySpec& spec) {
    json j;
    switch (spec.kind) {
        case TopologySpec::Kind::kMatrix:
            j["matrix"] = spec.matrix;
            j["destinations"] = spec.destinations;
            break;
        case TopologySpec::Kind::kCanonical:
            j["generator"] = {{"name", "canonical"},
                              {"hole_size", spec.canonical.hole_size},
                              {"source_to_short", spec.canonical.source_to_short},
                              {"source_to_long", spec.canonical.source_to_long},
                              {"short_to_dest", spec.canonical.short_to_dest},
                              {"long_hop", spec.canonical.long_hop},
                              {"hole_hop", spec.canonical.hole_hop}};
            break;
        case TopologySpec::Kind::kGrid: {
            json overrides = json::array();
            for (const auto& [a, b, p] : spec.grid.overrides) overrides.push_back({a, b, p});
            j["generator"] = {{"name", "grid"},         {"rows", spec.grid.rows},
                              {"cols", spec.grid.cols}, {"p_adjacent", spec.grid.p_adjacent},
                              {"p_diagonal", spec.grid.p_diagonal},
                              {"destination", spec.grid.destination},
                              {"overrides", overrides}};
            break;
        }
        case TopologySpec::Kind::kChain:
            j["generator"] = {{"name", "chain"}, {"length", spec.chain.length}, {"p", spec.chain.p}};
            break;
    }
    return j;
}

TopologySpec topology_from_json(const json& j) {
    TopologySpec spec;
    if (j.contains("matrix")) {
        spec.kind = TopologySpec::Kind::kMatrix;
        spec.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
        spec.destinations = j.at("destinations").get<std::vector<NodeId>>();
        return spec;
    }
    const json& g = j.at("generator");
    const std::string name = g.at("name").get<std::string>();
    if (name == "canonical") {
        spec.kind = TopologySpec::Kind::kCanonical;
        auto& c = spec.canonical;
        c.hole_size = g.value("hole_size", c.hole_size);
        c.source_to_short = g.value("source_to_short", c.source_to_short);
        c.source_to_long = g.value("source_to_long", c.source_to_long);
        c.short_to_dest = g.value("short_to_dest", c.short_to_dest);
        c.long_hop = g.value("long_hop", c.long_hop);
        c.hole_hop = g.value("hole_hop", c.hole_hop);
    } else if (name == "grid") {
        spec.kind = TopologySpec::Kind::kGrid;
        auto& gr = spec.grid;
        gr.rows = g.value("rows", gr.rows);
        gr.cols = g.value("cols", gr.cols);
        gr.p_adjacent = g.value("p_adjacent", gr.p_adjacent);
        gr.p_diagonal = g.value("p_diagonal", gr.p_diagonal);
        gr.destination = g.value("destination", gr.destination);
        if (g.contains("overrides"))
            for (const auto& o : g.at("overrides"))
                gr.overrides.emplace_back(o.at(0).get<NodeId>(), o.at(1).get<NodeId>(),
                                          o.at(2).get<double>());
    } else if (name == "chain") {
        spec.kind = TopologySpec::Kind::kChain;
        spec.chain.length = g.value("length", spec.chain.length);
        spec.chain.p = g.value("p", spec.chain.p);
    } else {
        throw ConfigError("unknown topology generator: " + name);
    }
    return spec;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& c) {
    json j;
    j["schema"] = c.schema;
    j["name"] = c.name;
    j["topology"] = topology_to_json(c.topology);
    j["policy"] = {{"name", std::string(to_string(c.policy))}, {"m", c.policy_m}};

    json traffic = json::array();
    for (const auto& t : c.sim.traffic) {
        json e = {{"node", t.node}, {"dest", t.destination}, {"rate", t.rate}};
        if (t.burst)
            e["burst"] = {{"period", t.burst->period_slots},
                          {"length", t.burst->length_slots},
                          {"rate", t.burst->rate}};
        traffic.push_back(e);
    }
    j["traffic"] = traffic;

    json initial = json::array();
    for (const auto& e : c.sim.initial_queue)
        initial.push_back({{"node", e.node}, {"dest", e.destination}, {"packets", e.packets}});

    j["sim"] = {{"horizon", c.sim.horizon},
                {"warmup_fraction", c.sim.warmup_fraction},
                {"ttl", c.sim.ttl},
                {"buffer_packets", c.sim.buffer_packets},
                {"amax", c.sim.amax},
                {"initial_queue", initial},
                {"seeds", c.seeds}};
    j["timing"] = {{"ts_slots", c.control.ts_slots}, {"tc_multiple", c.control.tc_multiple}};
    j["control"] = {{"loss_prob", c.control.loss_prob},
                    {"poison_reverse", c.control.poison_reverse},
                    {"expiry_epochs", c.control.expiry_epochs}};
    j["mac"] = {{"mode", c.mac.mode == MacMode::kIdealSlotted ? "ideal" : "contention"},
                {"data_bytes", c.mac.data_bytes},
                {"data_mbps", c.mac.data_mbps},
                {"ack_bytes", c.mac.ack_bytes},
                {"ack_mbps", c.mac.ack_mbps},
                {"fo_bytes", c.mac.fo_bytes},
                {"fo_mbps", c.mac.fo_mbps},
                {"sifs_us", c.mac.sifs_us},
                {"phy_slot_us", c.mac.phy_slot_us},
                {"retry_limit", c.mac.retry_limit},
                {"ack_loss", c.mac.model_ack_loss},
                {"fo_loss", c.mac.model_fo_loss}};
    j["estimator"] = {{"enabled", c.estimator.enabled},
                      {"alpha", c.estimator.alpha},
                      {"passive_ewma", c.estimator.passive_ewma},
                      {"window_slots", c.estimator.window_slots},
                      {"probes_per_window", c.estimator.probes_per_window}};
    j["output"] = {{"dir", c.out_dir}, {"backlog_series", c.write_backlog_series}};
    return j.dump(2);
}

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        ScenarioConfig c;
        c.schema = j.value("schema", 1);
        if (c.schema != 1) throw ConfigError("unsupported config schema version");
        c.name = j.value("name", std::string("scenario"));
        c.topology = topology_from_json(j.at("topology"));
        if (j.contains("policy")) {
            c.policy = policy_from_name(j.at("policy").at("name").get<std::string>());
            c.policy_m = j.at("policy").value("m", c.policy_m);
        }
        if (j.contains("traffic")) {
            for (const auto& e : j.at("traffic")) {
                TrafficSource t;
                t.node = e.at("node").get<NodeId>();
                t.destination = e.at("dest").get<NodeId>();
                t.rate = e.value("rate", 0.0);
                if (e.contains("burst")) {
                    BurstSpec b;
                    b.period_slots = e.at("burst").at("period").get<std::int64_t>();
                    b.length_slots = e.at("burst").at("length").get<std::int64_t>();
                    b.rate = e.at("burst").at("rate").get<double>();
                    t.burst = b;
                }
                c.sim.traffic.push_back(t);
            }
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            c.sim.horizon = s.value("horizon", c.sim.horizon);
            c.sim.warmup_fraction = s.value("warmup_fraction", c.sim.warmup_fraction);
            c.sim.ttl = s.value("ttl", c.sim.ttl);
            c.sim.buffer_packets = s.value("buffer_packets", c.sim.buffer_packets);
            c.sim.amax = s.value("amax", c.sim.amax);
            if (s.contains("initial_queue"))
                for (const auto& e : s.at("initial_queue"))
                    c.sim.initial_queue.push_back({e.at("node").get<NodeId>(),
                                                   e.at("dest").get<NodeId>(),
                                                   e.at("packets").get<int>()});
            if (s.contains("seeds")) c.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
        }
        if (j.contains("timing")) {
            c.control.ts_slots = j.at("timing").value("ts_slots", c.control.ts_slots);
            c.control.tc_multiple = j.at("timing").value("tc_multiple", c.control.tc_multiple);
        }
        if (j.contains("control")) {
            const json& k = j.at("control");
            c.control.loss_prob = k.value("loss_prob", c.control.loss_prob);
            c.control.poison_reverse = k.value("poison_reverse", c.control.poison_reverse);
            c.control.expiry_epochs = k.value("expiry_epochs", c.control.expiry_epochs);
        }
        if (j.contains("mac")) {
            const json& m = j.at("mac");
            const std::string mode = m.value("mode", std::string("ideal"));
            if (mode == "ideal")
                c.mac.mode = MacMode::kIdealSlotted;
            else if (mode == "contention")
                c.mac.mode = MacMode::kContentionTimed;
            else
                throw ConfigError("mac.mode must be ideal or contention");
            c.mac.data_bytes = m.value("data_bytes", c.mac.data_bytes);
            c.mac.data_mbps = m.value("data_mbps", c.mac.data_mbps);
            c.mac.ack_bytes = m.value("ack_bytes", c.mac.ack_bytes);
            c.mac.ack_mbps = m.value("ack_mbps", c.mac.ack_mbps);
            c.mac.fo_bytes = m.value("fo_bytes", c.mac.fo_bytes);
            c.mac.fo_mbps = m.value("fo_mbps", c.mac.fo_mbps);
            c.mac.sifs_us = m.value("sifs_us", c.mac.sifs_us);
            c.mac.phy_slot_us = m.value("phy_slot_us", c.mac.phy_slot_us);
            c.mac.retry_limit = m.value("retry_limit", c.mac.retry_limit);
            c.mac.model_ack_loss = m.value("ack_loss", c.mac.model_ack_loss);
            c.mac.model_fo_loss = m.value("fo_loss", c.mac.model_fo_loss);
        }
        if (j.contains("estimator")) {
            const json& e = j.at("estimator");
            c.estimator.enabled = e.value("enabled", c.estimator.enabled);
            c.estimator.alpha = e.value("alpha", c.estimator.alpha);
            c.estimator.passive_ewma = e.value("passive_ewma", c.estimator.passive_ewma);
            c.estimator.window_slots = e.value("window_slots", c.estimator.window_slots);
            c.estimator.probes_per_window = e.value("probes_per_window", c.estimator.probes_per_window);
        }
        if (j.contains("output")) {
            c.out_dir = j.at("output").value("dir", c.out_dir);
            c.write_backlog_series = j.at("output").value("backlog_series", c.write_backlog_series);
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> problems;
    Topology topology;
    try {
        topology = build_topology(c.topology);
    } catch (const std::exception& e) {
        problems.push_back(std::string("topology: ") + e.what());
        return problems;
    }
    const TopologyReport report = validate_topology(topology);
    if (!report.valid()) problems.push_back(report.to_string());

    if (c.seeds.empty()) problems.push_back("seeds list is empty");
    if (c.sim.horizon < 0) problems.push_back("horizon must be nonnegative");
    if (c.sim.warmup_fraction < 0.0 || c.sim.warmup_fraction >= 1.0)
        problems.push_back("warmup_fraction must lie in [0, 1)");
    if (c.control.ts_slots < 1) problems.push_back("ts_slots must be >= 1");
    if (c.control.tc_multiple < 1)
        problems.push_back("tc_multiple must be >= 1 (the cycle is a multiple of the control interval)");
    if (c.policy == PolicyKind::kPdorcd && c.policy_m < 1) problems.push_back("pdorcd needs m >= 1");
    for (const auto& t : c.sim.traffic) {
        if (t.rate < 0.0) problems.push_back("traffic rate must be nonnegative");
        if (!topology.links().valid_node(t.node)) problems.push_back("traffic source node out of range");
        if (!topology.is_destination(t.destination))
            problems.push_back("traffic destination is not a configured destination");
        if (t.node == t.destination) problems.push_back("traffic source equals its destination");
    }
    for (const auto& e : c.sim.initial_queue)
        if (!topology.links().valid_node(e.node) || !topology.is_destination(e.destination))
            problems.push_back("initial_queue entry references unknown node or destination");
    return problems;
}

std::uint64_t scenario_hash(const ScenarioConfig& config) {
    ScenarioConfig stripped = config;
    stripped.seeds.clear();
    const std::string text = serialize_config(stripped);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_string(SweepParam param) {
    switch (param) {
        case SweepParam::kLambda: return "lambda";
        case SweepParam::kHoleSize: return "N";
        case SweepParam::kM: return "M";
        case SweepParam::kTcMultiple: return "Tc_multiple";
    }
    return "?";
}

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep must look like param=v1,v2,...");
    const std::string name = text.substr(0, eq);
    SweepSpec spec;
    if (name == "lambda")
        spec.param = SweepParam::kLambda;
    else if (name == "N")
        spec.param = SweepParam::kHoleSize;
    else if (name == "M")
        spec.param = SweepParam::kM;
    else if (name == "Tc_multiple")
        spec.param = SweepParam::kTcMultiple;
    else
        throw ConfigError("unknown sweep parameter: " + name + " (lambda | N | M | Tc_multiple)");
    std::istringstream values(text.substr(eq + 1));
    std::string token;
    while (std::getline(values, token, ',')) {
        if (token.empty()) continue;
        try {
            spec.values.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ConfigError("sweep value is not a number: " + token);
        }
    }
    if (spec.values.empty()) throw ConfigError("sweep has no values");
    return spec;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& config, SweepParam param, double value) {
    ScenarioConfig out = config;
    switch (param) {
        case SweepParam::kLambda:
            for (auto& t : out.sim.traffic) t.rate = value;
            break;
        case SweepParam::kHoleSize:
            if (out.topology.kind != TopologySpec::Kind::kCanonical)
                throw ConfigError("sweeping N requires the canonical generator");
            out.topology.canonical.hole_size = static_cast<int>(value);
            break;
        case SweepParam::kM:
            out.policy_m = static_cast<std::size_t>(value);
            break;
        case SweepParam::kTcMultiple:
            out.control.tc_multiple = static_cast<int>(value);
            break;
    }
    return out;
}

}  // namespace orcd
