#include "orcd/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace orcd {

PolicyKind policy_from_name(std::string_view name) {
    if (name == "dorcd") return PolicyKind::kDorcd;
    if (name == "pdorcd") return PolicyKind::kPdorcd;
    if (name == "corcd") return PolicyKind::kCorcd;
    if (name == "divbar") return PolicyKind::kDivbar;
    if (name == "edivbar") return PolicyKind::kEdivbar;
    if (name == "exor") return PolicyKind::kExor;
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::kDorcd: return "dorcd";
        case PolicyKind::kPdorcd: return "pdorcd";
        case PolicyKind::kCorcd: return "corcd";
        case PolicyKind::kDivbar: return "divbar";
        case PolicyKind::kEdivbar: return "edivbar";
        case PolicyKind::kExor: return "exor";
    }
    return "?";
}

bool is_metric_policy(PolicyKind kind) { return kind != PolicyKind::kDivbar; }

NodeId select_next_hop(NodeId self, double self_score, std::span<const ScoredReceiver> receivers,
                       bool forward_on_tie) {
    NodeId best_id = 0;
    double best = kPoison;
    for (const auto& r : receivers) {
        if (r.score < best || (r.score == best && best_id != 0 && r.id < best_id)) {
            best = r.score;
            best_id = r.id;
        }
    }
    if (best_id == 0) return self;
    if (best < self_score) return best_id;
    if (best == self_score && forward_on_tie) return best_id;
    return self;
}

NodeId decide_dorcd(NodeId self, double own_value, std::span<const ScoredReceiver> heard) {
    return select_next_hop(self, own_value, heard, true);
}

NodeId decide_pdorcd(NodeId self, double own_value, std::span<const ScoredReceiver> heard,
                     const std::vector<NodeId>& best_forwarders) {
    std::vector<ScoredReceiver> eligible;
    eligible.reserve(heard.size());
    for (const auto& r : heard)
        if (std::find(best_forwarders.begin(), best_forwarders.end(), r.id) != best_forwarders.end())
            eligible.push_back(r);
    return select_next_hop(self, own_value, eligible, true);
}

NodeId decide_divbar(NodeId self, double own_queue, std::span<const ScoredReceiver> heard_backlogs) {
    std::vector<ScoredReceiver> diffs;
    diffs.reserve(heard_backlogs.size());
    for (const auto& r : heard_backlogs) diffs.push_back({r.id, r.score - own_queue});
    return select_next_hop(self, 0.0, diffs, false);
}

NodeId decide_edivbar(NodeId self, double own_queue, double own_etx,
                      std::span<const ScoredReceiver> heard_backlog_plus_etx) {
    std::vector<ScoredReceiver> scores;
    scores.reserve(heard_backlog_plus_etx.size());
    for (const auto& r : heard_backlog_plus_etx) scores.push_back({r.id, r.score - own_queue});
    return select_next_hop(self, own_etx, scores, true);
}

NodeId decide_exor(NodeId self, double own_etx, std::span<const ScoredReceiver> heard_etx) {
    return select_next_hop(self, own_etx, heard_etx, true);
}

std::optional<NodeId> select_commodity_backpressure(
    std::span<const std::pair<NodeId, double>> per_commodity_best_score) {
    std::optional<NodeId> best;
    double best_score = kPoison;
    for (const auto& [dest, score] : per_commodity_best_score) {
        const bool better = !best || score < best_score || (score == best_score && dest < *best);
        if (better) {
            best = dest;
            best_score = score;
        }
    }
    return best;
}

}  // namespace orcd
