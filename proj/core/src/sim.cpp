#include "orcd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orcd {

double MetricsLog::mean_delay() const {
    if (delay_samples.empty()) return 0.0;
    double sum = 0.0;
    for (auto d : delay_samples) sum += static_cast<double>(d);
    return sum / static_cast<double>(delay_samples.size());
}

double MetricsLog::delay_percentile(double q) const {
    if (delay_samples.empty()) return 0.0;
    std::vector<std::int64_t> sorted(delay_samples);
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) * (1.0 - frac) + static_cast<double>(sorted[hi]) * frac;
}

std::size_t NodeQueue::size(NodeId dest) const {
    const auto* q = find(dest);
    return q ? q->size() : 0;
}

std::deque<NodeQueue::Entry>* NodeQueue::find(NodeId dest) {
    for (auto& [d, q] : queues_)
        if (d == dest) return &q;
    return nullptr;
}

const std::deque<NodeQueue::Entry>* NodeQueue::find(NodeId dest) const {
    for (const auto& [d, q] : queues_)
        if (d == dest) return &q;
    return nullptr;
}

bool NodeQueue::push(Packet packet, std::uint64_t order) {
    if (full()) return false;
    auto* q = find(packet.destination);
    if (!q) {
        queues_.emplace_back(packet.destination, std::deque<Entry>());
        q = &queues_.back().second;
    }
    q->push_back({packet, order});
    ++total_;
    return true;
}

std::optional<NodeId> NodeQueue::fifo_commodity() const {
    const Entry* oldest = nullptr;
    NodeId dest = 0;
    for (const auto& [d, q] : queues_) {
        if (q.empty()) continue;
        if (!oldest || q.front().order < oldest->order) {
            oldest = &q.front();
            dest = d;
        }
    }
    if (!oldest) return std::nullopt;
    return dest;
}

const Packet* NodeQueue::head(NodeId dest) const {
    const auto* q = find(dest);
    if (!q || q->empty()) return nullptr;
    return &q->front().packet;
}

Packet NodeQueue::pop(NodeId dest) {
    auto* q = find(dest);
    if (!q || q->empty()) throw std::logic_error("NodeQueue::pop: empty commodity queue");
    Packet p = q->front().packet;
    q->pop_front();
    --total_;
    return p;
}

std::vector<NodeId> NodeQueue::backlogged_commodities() const {
    std::vector<NodeId> out;
    for (const auto& [d, q] : queues_)
        if (!q.empty()) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

Simulator::Simulator(Topology topology, PolicyKind policy, std::size_t policy_m, SimParams params,
                     MacConfig mac, ControlConfig control, EstimatorConfig estimator,
                     std::uint64_t seed)
    : topology_(std::move(topology)),
      policy_(policy),
      policy_m_(policy == PolicyKind::kPdorcd ? policy_m : kUnboundedForwarders),
      params_(std::move(params)),
      mac_(mac),
      control_config_(control),
      estimator_config_(estimator),
      seed_(seed) {
    if (policy_ == PolicyKind::kPdorcd && (policy_m_ == 0 || policy_m_ == kUnboundedForwarders))
        throw std::invalid_argument("Simulator: pdorcd requires 1 <= M");
    control_config_.max_forwarders = policy_m_;
    control_ = std::make_unique<ControlPlane>(topology_, control_config_,
                                              derive_stream(seed, stream_purpose::kControlLoss, 0));
    if (estimator_config_.enabled) {
        estimator_ = LinkEstimator(topology_.node_count(), estimator_config_);
        control_->set_link_provider([this](NodeId i, NodeId j) { return link_prob_view(i, j); });
    }
    etx_ = etx_table(topology_);

    const int n = topology_.node_count();
    nodes_.resize(n + 1);
    for (NodeId i = 1; i <= n; ++i) {
        nodes_[i].queue = std::make_unique<NodeQueue>(params_.buffer_packets);
        nodes_[i].mac = MacState{0, mac_.cw_min};
        nodes_[i].channel_rng = derive_stream(seed, stream_purpose::kChannel, i);
        nodes_[i].mac_rng = derive_stream(seed, stream_purpose::kMac, i);
        nodes_[i].arrival_rng = derive_stream(seed, stream_purpose::kArrivals, i);
    }
    if (mac_.mode == MacMode::kContentionTimed) conflict_ = build_conflict_graph(topology_);

    metrics_.horizon = params_.horizon;
    metrics_.warmup_slots = params_.warmup_slots();
    metrics_.total_backlog.reserve(params_.horizon);
    if (params_.record_node_backlog) {
        metrics_.node_backlog_stride = n + 1;
        metrics_.node_backlog.reserve(static_cast<std::size_t>(params_.horizon) * (n + 1));
    }

    for (const auto& entry : params_.initial_queue) {
        for (int k = 0; k < entry.packets; ++k) {
            Packet p{next_packet_id_++, entry.node, entry.destination, 0, 0, params_.ttl};
            metrics_.created += 1;
            if (metrics_.warmup_slots == 0) metrics_.cohort_created += 1;
            if (!nodes_[entry.node].queue->push(p, next_order_++)) {
                metrics_.drop_buffer += 1;
                if (metrics_.warmup_slots == 0) metrics_.cohort_drop_buffer += 1;
            }
        }
    }
}

double Simulator::link_prob_view(NodeId i, NodeId j) const {
    const double truth = topology_.links()(i, j);
    if (!estimator_config_.enabled) return truth;
    // Optimistic bootstrap: unobserved links are assumed good until probed.
    return truth > 0.0 ? estimator_.estimate(i, j, 1.0) : 0.0;
}

double Simulator::queue_len(NodeId i, NodeId dest) const {
    return static_cast<double>(nodes_[i].queue->size(dest));
}

std::size_t Simulator::queue_len(NodeId i) const { return nodes_[i].queue->size(); }

bool Simulator::conservation_ok() const {
    std::uint64_t queued = 0;
    for (NodeId i = 1; i <= topology_.node_count(); ++i) queued += nodes_[i].queue->size();
    return metrics_.created ==
           metrics_.delivered + metrics_.drop_buffer + metrics_.drop_ttl + metrics_.drop_retry + queued;
}

void Simulator::control_epoch() {
    control_->run_epoch([this](NodeId i, NodeId d) { return queue_len(i, d); });
}

void Simulator::estimator_window() {
    estimator_.roll_window();
    // Probe burst for the new window: every node broadcasts dedicated probes;
    // each neighbor samples reception per probe.
    RngStream probe_rng = derive_stream(seed_, stream_purpose::kProbes,
                                        static_cast<std::uint64_t>(slot_));
    for (NodeId i = 1; i <= topology_.node_count(); ++i)
        for (int probe = 0; probe < estimator_config_.probes_per_window; ++probe)
            for (NodeId j : topology_.neighbors(i))
                estimator_.record_probe(i, j, probe_rng.bernoulli(topology_.links()(i, j)));
    // ETX follows the estimated qualities.
    LinkMatrix est(topology_.node_count());
    for (NodeId i = 1; i <= topology_.node_count(); ++i)
        for (NodeId j : topology_.neighbors(i)) est.set(i, j, link_prob_view(i, j));
    etx_ = etx_table(Topology(est, topology_.destinations()));
}

std::vector<NodeId> Simulator::pick_transmitters() {
    const int n = topology_.node_count();
    std::vector<NodeId> backlogged;
    for (NodeId i = 1; i <= n; ++i)
        if (!nodes_[i].queue->empty()) backlogged.push_back(i);
    if (mac_.mode == MacMode::kIdealSlotted || backlogged.empty()) return backlogged;

    // One transmitter per conflict clique, rotating priority.
    std::sort(backlogged.begin(), backlogged.end(), [&](NodeId a, NodeId b) {
        const auto ra = (static_cast<std::uint64_t>(a) - 1 + round_robin_) % n;
        const auto rb = (static_cast<std::uint64_t>(b) - 1 + round_robin_) % n;
        if (ra != rb) return ra < rb;
        return a < b;
    });
    std::vector<NodeId> admitted;
    for (NodeId cand : backlogged) {
        bool clash = false;
        for (NodeId got : admitted)
            if (conflict_[cand][got]) {
                clash = true;
                break;
            }
        if (!clash) admitted.push_back(cand);
    }
    std::sort(admitted.begin(), admitted.end());
    return admitted;
}

std::optional<NodeId> Simulator::choose_commodity(NodeId i) {
    NodeQueue& queue = *nodes_[i].queue;
    if (queue.empty()) return std::nullopt;
    if (policy_ != PolicyKind::kDivbar && policy_ != PolicyKind::kEdivbar)
        return queue.fifo_commodity();

    // Backpressure family: the commodity with the most negative best
    // differential over the neighborhood.
    std::vector<std::pair<NodeId, double>> scores;
    for (NodeId d : queue.backlogged_commodities()) {
        const double own = static_cast<double>(queue.size(d));
        double best = kPoison;
        for (NodeId k : topology_.neighbors(i)) {
            double s = control_->backlog_estimate(i, k, d) - own;
            if (policy_ == PolicyKind::kEdivbar) s += etx_.at(k, d);
            best = std::min(best, s);
        }
        scores.emplace_back(d, best);
    }
    return select_commodity_backpressure(scores);
}

NodeId Simulator::decide(NodeId i, NodeId commodity, const std::vector<NodeId>& heard) {
    // A destination that acknowledged always takes its own packet.
    for (NodeId k : heard)
        if (k == commodity) return k;

    std::vector<ScoredReceiver> scored;
    scored.reserve(heard.size());
    switch (policy_) {
        case PolicyKind::kDorcd: {
            for (NodeId k : heard) scored.push_back({k, control_->actual_estimate(i, k, commodity)});
            return decide_dorcd(i, control_->actual_value(i, commodity), scored);
        }
        case PolicyKind::kPdorcd: {
            for (NodeId k : heard) scored.push_back({k, control_->actual_estimate(i, k, commodity)});
            return decide_pdorcd(i, control_->actual_value(i, commodity), scored,
                                 control_->best_forwarders(i, commodity));
        }
        case PolicyKind::kCorcd: {
            const auto& v = corcd_values_[commodity];
            for (NodeId k : heard) scored.push_back({k, v[k]});
            return decide_dorcd(i, v[i], scored);
        }
        case PolicyKind::kDivbar: {
            for (NodeId k : heard) scored.push_back({k, control_->backlog_estimate(i, k, commodity)});
            return decide_divbar(i, queue_len(i, commodity), scored);
        }
        case PolicyKind::kEdivbar: {
            for (NodeId k : heard)
                scored.push_back(
                    {k, control_->backlog_estimate(i, k, commodity) + etx_.at(k, commodity)});
            return decide_edivbar(i, queue_len(i, commodity), etx_.at(i, commodity), scored);
        }
        case PolicyKind::kExor: {
            for (NodeId k : heard) scored.push_back({k, etx_.at(k, commodity)});
            return decide_exor(i, etx_.at(i, commodity), scored);
        }
    }
    return i;
}

void Simulator::transmit(NodeId i, std::vector<PendingAction>& actions) {
    const auto commodity = choose_commodity(i);
    if (!commodity) return;

    ForwarderSet fs = sample_forwarder_set(topology_, i, nodes_[i].channel_rng);

    if (estimator_config_.enabled)
        for (NodeId j : topology_.neighbors(i)) estimator_.record_passive(i, j, fs.contains(j));

    // Partial diversity: only the best-forwarder set may acknowledge.
    std::vector<NodeId> eligible;
    std::size_t ack_slots = topology_.neighbors(i).size();
    if (policy_ == PolicyKind::kPdorcd) {
        const auto& bf = control_->best_forwarders(i, *commodity);
        for (NodeId k : fs.receivers)
            if (std::find(bf.begin(), bf.end(), k) != bf.end()) eligible.push_back(k);
        ack_slots = bf.size();
    } else {
        eligible = fs.receivers;
    }

    // ACK stage: in contention mode the transmitter hears each ACK with the
    // reverse link probability.
    std::vector<NodeId> heard;
    if (mac_.mode == MacMode::kContentionTimed && mac_.model_ack_loss) {
        for (NodeId k : eligible)
            if (nodes_[i].mac_rng.bernoulli(topology_.links()(k, i))) heard.push_back(k);
    } else {
        heard = eligible;
    }

    const NodeId decision = decide(i, *commodity, heard);
    PendingAction action;
    action.from = i;
    action.commodity = *commodity;
    action.outcome = resolve_handshake(topology_, i, heard, decision, ack_slots, mac_,
                                       nodes_[i].mac, nodes_[i].mac_rng);

    metrics_.transmissions += 1;
    metrics_.ack_slots_total += ack_slots;
    metrics_.overhead_data_bytes += static_cast<std::uint64_t>(mac_.data_bytes);
    metrics_.overhead_ack_bytes += ack_slots * static_cast<std::uint64_t>(mac_.ack_bytes);
    metrics_.overhead_data_us += mac_.data_airtime_us();
    metrics_.overhead_ack_us += static_cast<double>(ack_slots) * mac_.ack_slot_us();
    const double accounted = action.outcome.overhead_us - mac_.data_airtime_us() -
                             static_cast<double>(ack_slots) * mac_.ack_slot_us();
    if (action.outcome.status == HandshakeStatus::kRetry ||
        action.outcome.status == HandshakeStatus::kDroppedRetry) {
        metrics_.overhead_backoff_us += accounted;
    } else if (!heard.empty()) {
        metrics_.overhead_fo_bytes += static_cast<std::uint64_t>(mac_.fo_bytes);
        metrics_.overhead_fo_us += mac_.fo_airtime_us();
        metrics_.overhead_backoff_us += accounted - mac_.fo_airtime_us();
    } else {
        metrics_.overhead_backoff_us += accounted;
    }

    actions.push_back(std::move(action));
}

void Simulator::apply(const PendingAction& action) {
    NodeQueue& queue = *nodes_[action.from].queue;
    switch (action.outcome.status) {
        case HandshakeStatus::kRetained:
        case HandshakeStatus::kRetry:
            return;
        case HandshakeStatus::kFoLost:
            metrics_.fo_loss_events += 1;
            return;
        case HandshakeStatus::kDroppedRetry: {
            const Packet p = queue.pop(action.commodity);
            metrics_.drop_retry += 1;
            if (p.creation_slot >= metrics_.warmup_slots) metrics_.cohort_drop_retry += 1;
            return;
        }
        case HandshakeStatus::kHandedOff:
            break;
    }

    Packet p = queue.pop(action.commodity);
    const NodeId to = action.outcome.recipient;
    if (params_.record_slot_trace) trace_.handoffs.push_back({action.from, to, action.commodity});
    if (to == p.destination) {
        metrics_.delivered += 1;
        if (p.creation_slot >= metrics_.warmup_slots) {
            metrics_.cohort_delivered += 1;
            metrics_.delay_samples.push_back(slot_ + 1 - p.creation_slot);
        }
        return;
    }
    p.hop_count += 1;
    p.ttl_remaining -= 1;
    if (p.ttl_remaining <= 0) {
        metrics_.drop_ttl += 1;
        if (p.creation_slot >= metrics_.warmup_slots) metrics_.cohort_drop_ttl += 1;
        return;
    }
    if (!nodes_[to].queue->push(p, next_order_++)) {
        metrics_.drop_buffer += 1;
        if (p.creation_slot >= metrics_.warmup_slots) metrics_.cohort_drop_buffer += 1;
    }
}

void Simulator::arrivals() {
    for (const auto& source : params_.traffic) {
        double rate = source.rate;
        if (source.burst && source.burst->period_slots > 0) {
            const auto phase = slot_ % source.burst->period_slots;
            rate = phase < source.burst->length_slots ? source.burst->rate : source.rate;
        }
        if (rate <= 0.0) continue;
        int batch = nodes_[source.node].arrival_rng.poisson(rate);
        batch = std::min(batch, params_.amax);
        for (int k = 0; k < batch; ++k) {
            // Arrivals land at the end of the slot: first transmittable in
            // slot_ + 1, which is also their creation time for delay purposes.
            Packet p{next_packet_id_++, source.node, source.destination, slot_ + 1, 0, params_.ttl};
            metrics_.created += 1;
            const bool cohort = p.creation_slot >= metrics_.warmup_slots;
            if (cohort) metrics_.cohort_created += 1;
            if (params_.record_slot_trace)
                trace_.arrivals.push_back({source.node, source.destination, 1});
            if (!nodes_[source.node].queue->push(p, next_order_++)) {
                metrics_.drop_buffer += 1;
                if (cohort) metrics_.cohort_drop_buffer += 1;
            }
        }
    }
}

void Simulator::record_metrics() {
    const int n = topology_.node_count();
    double total = 0.0;
    for (NodeId i = 1; i <= n; ++i) total += static_cast<double>(nodes_[i].queue->size());
    metrics_.total_backlog.push_back(total);
    if (params_.record_node_backlog) {
        metrics_.node_backlog.push_back(0);  // node 0 padding
        for (NodeId i = 1; i <= n; ++i)
            metrics_.node_backlog.push_back(static_cast<std::uint32_t>(nodes_[i].queue->size()));
    }
}

void Simulator::refresh_corcd_tables() {
    corcd_values_.assign(topology_.node_count() + 1, {});
    std::vector<double> q(topology_.node_count() + 1, 0.0);
    for (NodeId dest : topology_.destinations()) {
        for (NodeId i = 1; i <= topology_.node_count(); ++i) q[i] = queue_len(i, dest);
        corcd_values_[dest] = solve_fixed_point(topology_, q, CostVariant::kQueue, dest).value;
    }
}

void Simulator::step() {
    if (params_.record_slot_trace) {
        trace_.handoffs.clear();
        trace_.arrivals.clear();
    }
    if (estimator_config_.enabled && slot_ % estimator_config_.window_slots == 0)
        estimator_window();
    if (slot_ % control_config_.ts_slots == 0) control_epoch();
    if (policy_ == PolicyKind::kCorcd) refresh_corcd_tables();

    std::vector<PendingAction> actions;
    for (NodeId i : pick_transmitters()) transmit(i, actions);
    for (const auto& action : actions) apply(action);
    round_robin_ += 1;

    arrivals();
    record_metrics();
    ++slot_;
}

void Simulator::run() {
    while (slot_ < params_.horizon) {
        step();
        if (slot_ == metrics_.warmup_slots) {
            metrics_.transmissions_at_warmup = metrics_.transmissions;
            metrics_.fo_loss_events_at_warmup = metrics_.fo_loss_events;
            metrics_.overhead_us_at_warmup = metrics_.overhead_us();
        }
    }
}

}  // namespace orcd
