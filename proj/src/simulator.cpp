#include "econcast/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace econcast {

void SimConfig::validate() const {
    network.validate();
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");
    if (!(duration > 0)) throw std::invalid_argument("duration must be > 0");
    if (!(warmup >= 0) || warmup >= duration) {
        throw std::invalid_argument("need 0 <= warmup < duration");
    }
    if (!(packet_length > 0)) throw std::invalid_argument("packet_length must be > 0");
    if (!(tau > 0)) throw std::invalid_argument("tau must be > 0");
    if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
    if (estimator == EstimatorKind::PingBased) {
        if (!(ping_length > 0) || !(ping_length < ping_interval)) {
            throw std::invalid_argument("need 0 < ping_length < ping_interval");
        }
        if (variant == ProtocolVariant::NonCapture) {
            throw std::invalid_argument(
                "ping-based estimation is modeled for the capture variant only");
        }
    }
    if (freeze_multipliers) freeze_multipliers->validate(network.node_count());
    if (initial_multipliers) initial_multipliers->validate(network.node_count());
    if (collect_occupancy &&
        (!network.topology.is_clique() || network.node_count() > 8)) {
        throw std::invalid_argument("occupancy collection supports cliques with <= 8 nodes");
    }
    if (battery_floor && battery_ceiling && *battery_floor > *battery_ceiling) {
        throw std::invalid_argument("battery floor above ceiling");
    }
}

ListenerEstimate estimate_listeners_ping(int listening_nodes, Rng& rng, const SimConfig& config) {
    if (listening_nodes <= 0) return ListenerEstimate::from_count(0);
    if (listening_nodes == 1) return ListenerEstimate::from_count(1);
    std::vector<double> starts(static_cast<std::size_t>(listening_nodes));
    const double span = config.ping_interval - config.ping_length;
    for (double& s : starts) s = rng.uniform(0.0, span);
    std::sort(starts.begin(), starts.end());
    int survivors = 0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const bool clash_prev = k > 0 && starts[k] - starts[k - 1] < config.ping_length;
        const bool clash_next =
            k + 1 < starts.size() && starts[k + 1] - starts[k] < config.ping_length;
        if (!clash_prev && !clash_next) ++survivors;
    }
    return ListenerEstimate::from_count(survivors);
}

namespace {

struct StreamingMean {
    std::uint64_t count = 0;
    double sum = 0.0;

    void add(double v) {
        ++count;
        sum += v;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

class Simulation {
  public:
    explicit Simulation(const SimConfig& config)
        : cfg_(config),
          n_(config.network.node_count()),
          rng_(Rng::derive(config.seed, 0)),
          clique_(config.network.topology.is_clique()) {
        nodes_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            auto& nd = nodes_[i];
            nd.runtime.params = cfg_.network.nodes[i];
            nd.peak = std::max(nd.runtime.params.listen_cost, nd.runtime.params.transmit_cost);
            if (cfg_.freeze_multipliers) {
                nd.runtime.multiplier = cfg_.freeze_multipliers->eta[i];
            } else if (cfg_.initial_multipliers) {
                nd.runtime.multiplier = cfg_.initial_multipliers->eta[i];
            }
        }
        exp_c_over_sigma_.resize(static_cast<std::size_t>(n_) + 1);
        for (int c = 0; c <= n_; ++c) {
            exp_c_over_sigma_[c] = std::exp(static_cast<double>(c) / cfg_.sigma);
        }
        refresh_rate_cache();
        if (cfg_.collect_occupancy) {
            space_.emplace(n_);
            occupancy_.assign(space_->size(), 0.0);
        }
        if (!clique_) in_range_tx_.assign(n_, 0);
        next_tick_ = tick_length(1);
        pending_warmup_ = cfg_.warmup > 0;
        if (cfg_.event_trace) cfg_.event_trace->precision(17);
    }

    SimMetrics run() {
        const double end = cfg_.duration;
        while (now_ < end) {
            if (cfg_.max_events && events_ >= cfg_.max_events) break;
            enum class Det { End, Tick, Packet, Ping, Warmup };
            double det_time = std::min(end, next_tick_);
            Det det = next_tick_ < end ? Det::Tick : Det::End;
            if (pending_warmup_ && cfg_.warmup <= det_time) {
                det = Det::Warmup;
                det_time = cfg_.warmup;
            }
            for (std::size_t k = 0; k < live_tx_.size(); ++k) {
                const auto& tx = live_tx_[k];
                const double t = tx.pinging ? tx.ping_end : tx.packet_end;
                if (t < det_time) {
                    det_time = t;
                    det = tx.pinging ? Det::Ping : Det::Packet;
                    det_tx_ = k;
                }
            }
            const double total_rate = markov_total_rate();
            double markov_time = std::numeric_limits<double>::infinity();
            if (total_rate > 0) markov_time = now_ + rng_.exponential(total_rate);
            if (det_time <= markov_time) {
                advance_to(det_time);
                switch (det) {
                    case Det::End: goto done;
                    case Det::Tick: on_tick(); break;
                    case Det::Warmup: on_warmup(); break;
                    case Det::Packet:
                        on_packet_end(det_tx_);
                        ++events_;
                        break;
                    case Det::Ping:
                        on_ping_interval_end(det_tx_);
                        ++events_;
                        break;
                }
            } else {
                advance_to(markov_time);
                fire_markov(total_rate);
                ++events_;
            }
        }
    done:
        advance_to(std::min(cfg_.duration, now_));
        flush_all();
        return collect();
    }

  private:
    struct Node {
        NodeState state = NodeState::Sleep;
        NodeRuntime runtime;
        double peak = 0.0;
        double last_flush = 0.0;
        double listen_time = 0.0;
        double transmit_time = 0.0;
        // cached rates, per second
        double rate_sl = 0.0;
        double rate_lx_base = 0.0;
        // reception bookkeeping
        int burst_tx = -1;
        std::uint64_t burst_packets = 0;
        double last_burst_end = -1.0;
        bool slept_since_burst = false;
    };

    struct LiveTransmission {
        int node = -1;
        double packet_start = 0.0;
        double packet_end = 0.0;
        bool pinging = false;
        double ping_end = 0.0;
        int last_clean = 0;              // clean receivers of the last packet
        std::uint64_t run_packets = 0;   // packets of this run heard by anyone
        std::vector<int> audience;       // listeners at packet start
        std::vector<bool> audience_dirty;  // overlapped at some instant
    };

    double tick_length(std::int64_t k) const {
        if (!cfg_.log_harmonic_schedule) return cfg_.tau * static_cast<double>(k);
        // tau_k = k * tau: cumulative k(k+1)/2 * tau
        return cfg_.tau * 0.5 * static_cast<double>(k) * static_cast<double>(k + 1);
    }

    void refresh_rate_cache() {
        const double inv_packet = 1.0 / cfg_.packet_length;
        for (auto& nd : nodes_) {
            const double eta = nd.runtime.multiplier;
            const double L = nd.runtime.params.listen_cost;
            const double X = nd.runtime.params.transmit_cost;
            nd.rate_sl = std::exp(-eta * L / cfg_.sigma) * inv_packet;
            nd.rate_lx_base = std::exp(eta * (L - X) / cfg_.sigma) * inv_packet;
        }
    }

    bool carrier_clear(int i) const {
        if (clique_) return live_tx_.empty();
        return in_range_tx_[i] == 0;
    }

    int listeners_in_range(int i) const {
        int c = 0;
        for (int j = 0; j < n_; ++j) {
            if (j != i && nodes_[j].state == NodeState::Listen &&
                cfg_.network.topology.adjacent(i, j)) {
                ++c;
            }
        }
        return c;
    }

    double node_rate(const Node& nd, int i) const {
        if (!carrier_clear(i)) return 0.0;
        const double inv_packet = 1.0 / cfg_.packet_length;
        switch (nd.state) {
            case NodeState::Sleep: return nd.rate_sl;
            case NodeState::Listen: {
                double lx = nd.rate_lx_base;
                if (cfg_.variant == ProtocolVariant::NonCapture) {
                    const int c = listeners_in_range(i);
                    lx *= exp_c_over_sigma_[clamp_count(
                        cfg_.mode == ThroughputMode::Groupput ? c : (c >= 1 ? 1 : 0))];
                }
                return inv_packet + lx;  // listen->sleep plus listen->transmit
            }
            case NodeState::Transmit: return 0.0;  // packetized
        }
        return 0.0;
    }

    int clamp_count(int c) const { return std::min(c, n_); }

    double markov_total_rate() const {
        // Fast path: on a busy clique everything is carrier-gated.
        if (clique_ && !live_tx_.empty()) return 0.0;
        double total = 0.0;
        for (int i = 0; i < n_; ++i) total += node_rate(nodes_[i], i);
        return total;
    }

    void fire_markov(double total_rate) {
        double u = rng_.uniform01() * total_rate;
        for (int i = 0; i < n_; ++i) {
            const double r = node_rate(nodes_[i], i);
            if (u >= r) {
                u -= r;
                continue;
            }
            auto& nd = nodes_[i];
            if (nd.state == NodeState::Sleep) {
                change_state(i, NodeState::Listen);
            } else {
                const double inv_packet = 1.0 / cfg_.packet_length;
                if (u < inv_packet) {
                    change_state(i, NodeState::Sleep);
                    nd.slept_since_burst = true;
                } else {
                    begin_transmission(i);
                }
            }
            return;
        }
        // Rounding can leave u marginally above the scan; treat as no-op.
    }

    void begin_transmission(int i) {
        change_state(i, NodeState::Transmit);
        if (!clique_) bump_in_range(i, +1);
        LiveTransmission tx;
        tx.node = i;
        tx.packet_start = now_;
        tx.packet_end = now_ + cfg_.packet_length;
        live_tx_.push_back(std::move(tx));
        start_packet_audience(live_tx_.back());
    }

    // in_range_tx_ already counts tx.node itself for its neighbors, so an
    // overlap at receiver j means a count above one.
    void start_packet_audience(LiveTransmission& tx) {
        tx.audience.clear();
        tx.audience_dirty.clear();
        for (int j = 0; j < n_; ++j) {
            if (j != tx.node && nodes_[j].state == NodeState::Listen &&
                cfg_.network.topology.adjacent(tx.node, j)) {
                tx.audience.push_back(j);
                const bool overlapped = !clique_ && in_range_tx_[j] > 1;
                tx.audience_dirty.push_back(overlapped);
                if (overlapped) dirty_receiver(j);
            }
        }
    }

    // Mark receiver j dirty in every live packet that covers it.
    void dirty_receiver(int j) {
        for (auto& tx : live_tx_) {
            for (std::size_t k = 0; k < tx.audience.size(); ++k) {
                if (tx.audience[k] == j) tx.audience_dirty[k] = true;
            }
        }
    }

    void bump_in_range(int transmitter, int delta) {
        for (int j = 0; j < n_; ++j) {
            if (j != transmitter && cfg_.network.topology.adjacent(transmitter, j)) {
                in_range_tx_[j] += delta;
            }
        }
    }

    void on_packet_end(std::size_t idx) {
        LiveTransmission& tx = live_tx_[idx];
        // Credit the packet.
        int clean = 0;
        for (std::size_t k = 0; k < tx.audience.size(); ++k) {
            const int r = tx.audience[k];
            if (tx.audience_dirty[k]) {
                collided_time_ += cfg_.packet_length;
                finalize_burst(r);
                continue;
            }
            ++clean;
            groupput_time_ += cfg_.packet_length;
            auto& rec = nodes_[r];
            if (rec.burst_tx == tx.node) {
                ++rec.burst_packets;
            } else {
                finalize_burst(r);
                rec.burst_tx = tx.node;
                rec.burst_packets = 1;
                if (rec.last_burst_end >= 0.0 && rec.slept_since_burst) {
                    add_latency(tx.packet_start - rec.last_burst_end);
                }
            }
        }
        if (clean >= 1) {
            anyput_time_ += cfg_.packet_length;
            ++tx.run_packets;
        }
        tx.last_clean = clean;

        if (cfg_.variant == ProtocolVariant::NonCapture) {
            release_channel(idx);
            return;
        }
        if (cfg_.estimator == EstimatorKind::PingBased) {
            tx.pinging = true;
            tx.ping_end = now_ + cfg_.ping_interval;
            return;
        }
        // Ground truth c(t) counts the listening neighbors, not the clean
        // receivers; a hidden-terminal overlap can keep a capture alive even
        // while it delivers nothing at the wrecked receivers.
        continue_or_release(idx, ListenerEstimate::from_count(static_cast<int>(tx.audience.size())));
    }

    void on_ping_interval_end(std::size_t idx) {
        LiveTransmission& tx = live_tx_[idx];
        tx.pinging = false;
        const ListenerEstimate est = estimate_listeners_ping(tx.last_clean, rng_, cfg_);
        continue_or_release(idx, est);
    }

    void continue_or_release(std::size_t idx, const ListenerEstimate& est) {
        LiveTransmission& tx = live_tx_[idx];
        const double p = transmit_continuation_probability(est, cfg_.sigma, cfg_.mode);
        if (rng_.bernoulli(p)) {
            tx.packet_start = now_;
            tx.packet_end = now_ + cfg_.packet_length;
            start_packet_audience(tx);
        } else {
            release_channel(idx);
        }
    }

    void release_channel(std::size_t idx) {
        const int node = live_tx_[idx].node;
        for (int r : live_tx_[idx].audience) {
            if (nodes_[r].burst_tx == node) finalize_burst(r);
        }
        if (live_tx_[idx].run_packets > 0) {
            run_stats_.add(static_cast<double>(live_tx_[idx].run_packets));
        }
        if (!clique_) bump_in_range(node, -1);
        live_tx_.erase(live_tx_.begin() + static_cast<std::ptrdiff_t>(idx));
        change_state(node, NodeState::Listen);
    }

    void finalize_burst(int r) {
        auto& rec = nodes_[r];
        if (rec.burst_tx < 0) return;
        add_burst(static_cast<double>(rec.burst_packets));
        rec.burst_tx = -1;
        rec.burst_packets = 0;
        rec.last_burst_end = now_;
        rec.slept_since_burst = false;
    }

    void add_burst(double packets) {
        burst_stats_.add(packets);
        if (bursts_.size() < cfg_.sample_cap) bursts_.push_back(packets);
    }

    void add_latency(double seconds) {
        latency_stats_.add(seconds);
        if (latencies_.size() < cfg_.sample_cap) latencies_.push_back(seconds);
    }

    void on_warmup() {
        flush_all();
        pending_warmup_ = false;
        measure_start_ = now_;
        groupput_time_ = anyput_time_ = collided_time_ = 0.0;
        burst_stats_ = {};
        run_stats_ = {};
        latency_stats_ = {};
        bursts_.clear();
        latencies_.clear();
        for (auto& nd : nodes_) nd.listen_time = nd.transmit_time = 0.0;
        if (space_) occupancy_.assign(occupancy_.size(), 0.0);
    }

    void on_tick() {
        ++tick_index_;
        next_tick_ = tick_length(tick_index_ + 1);
        if (cfg_.freeze_multipliers) return;
        flush_all();
        const double tau_k = cfg_.log_harmonic_schedule
                                 ? cfg_.tau * static_cast<double>(tick_index_)
                                 : cfg_.tau;
        for (auto& nd : nodes_) {
            double delta_k = cfg_.delta / (nd.peak * nd.peak);
            if (cfg_.log_harmonic_schedule) {
                const double k = static_cast<double>(tick_index_);
                delta_k /= (k + 1.0) * std::log(k + 1.0);
            }
            update_multiplier(nd.runtime, delta_k, tau_k, nd.runtime.battery);
        }
        refresh_rate_cache();
        maybe_record_multipliers();
    }

    void maybe_record_multipliers() {
        const auto expected_ticks = static_cast<double>(
            cfg_.log_harmonic_schedule ? tick_index_ : static_cast<std::int64_t>(
                                                       cfg_.duration / cfg_.tau));
        const auto stride = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(expected_ticks /
                                         static_cast<double>(cfg_.multiplier_trace_cap)));
        if (tick_index_ % stride != 0) return;
        std::vector<double> etas(n_);
        for (int i = 0; i < n_; ++i) etas[i] = nodes_[i].runtime.multiplier;
        multiplier_trace_.push_back(std::move(etas));
        multiplier_trace_times_.push_back(now_);
    }

    void advance_to(double t) {
        if (space_) occupancy_accrue(t - now_);
        now_ = t;
    }

    void occupancy_accrue(double dt) {
        if (dt <= 0) return;
        NetworkState w(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) w[i] = nodes_[i].state;
        occupancy_[space_->index_of(w)] += dt;
    }

    double state_cost(const Node& nd) const {
        switch (nd.state) {
            case NodeState::Sleep: return 0.0;
            case NodeState::Listen: return nd.runtime.params.listen_cost;
            case NodeState::Transmit: return nd.runtime.params.transmit_cost;
        }
        return 0.0;
    }

    void flush_node(int i) {
        auto& nd = nodes_[i];
        const double dt = now_ - nd.last_flush;
        if (dt <= 0) return;
        double cost = state_cost(nd);
        bool listen_time_accrues = nd.state == NodeState::Listen;
        if (nd.state == NodeState::Transmit) {
            // During a pinging interval the transmitter listens for pings.
            bool pinging = false;
            for (const auto& tx : live_tx_) {
                if (tx.node == i && tx.pinging) pinging = true;
            }
            if (pinging) {
                cost = cfg_.ping_interval_counts_as_listen ? nd.runtime.params.listen_cost : 0.0;
                listen_time_accrues = true;
            } else {
                nd.transmit_time += dt;
            }
        }
        if (listen_time_accrues) nd.listen_time += dt;
        double b = nd.runtime.battery + (nd.runtime.params.rho - cost) * dt;
        if (cfg_.battery_ceiling) b = std::min(b, *cfg_.battery_ceiling);
        if (cfg_.battery_floor) b = std::max(b, *cfg_.battery_floor);
        nd.runtime.battery = b;
        nd.last_flush = now_;
    }

    void flush_all() {
        for (int i = 0; i < n_; ++i) flush_node(i);
    }

    void change_state(int i, NodeState next) {
        flush_node(i);
        auto& nd = nodes_[i];
        if (cfg_.event_trace) {
            (*cfg_.event_trace) << now_ << ',' << i << ',' << to_char(nd.state) << ','
                                << to_char(next) << '\n';
        }
        nd.state = next;
    }

    SimMetrics collect() {
        const double window = now_ - measure_start_;
        SimMetrics m;
        m.sim_time = now_;
        m.events = events_;
        m.groupput = groupput_time_ / window;
        m.anyput = anyput_time_ / window;
        m.collided_time = collided_time_;
        m.burst_lengths = std::move(bursts_);
        m.burst_count = burst_stats_.count;
        m.burst_mean = burst_stats_.mean();
        m.burst_run_count = run_stats_.count;
        m.burst_run_mean = run_stats_.mean();
        m.latencies = std::move(latencies_);
        m.latency_count = latency_stats_.count;
        m.latency_mean = latency_stats_.mean();
        m.per_node_energy_rate.resize(n_);
        m.listen_fraction.resize(n_);
        m.transmit_fraction.resize(n_);
        m.final_multipliers.resize(n_);
        m.final_battery.resize(n_);
        for (int i = 0; i < n_; ++i) {
            const auto& nd = nodes_[i];
            m.listen_fraction[i] = nd.listen_time / window;
            m.transmit_fraction[i] = nd.transmit_time / window;
            m.per_node_energy_rate[i] =
                (nd.listen_time * nd.runtime.params.listen_cost +
                 nd.transmit_time * nd.runtime.params.transmit_cost) /
                window;
            m.final_multipliers[i] = nd.runtime.multiplier;
            m.final_battery[i] = nd.runtime.battery;
        }
        m.multiplier_trace = std::move(multiplier_trace_);
        m.multiplier_trace_times = std::move(multiplier_trace_times_);
        if (space_) {
            m.occupancy.resize(occupancy_.size());
            for (std::size_t s = 0; s < occupancy_.size(); ++s) {
                m.occupancy[s] = occupancy_[s] / window;
            }
        }
        return m;
    }

    const SimConfig& cfg_;
    int n_;
    Rng rng_;
    bool clique_;
    std::vector<Node> nodes_;
    std::vector<LiveTransmission> live_tx_;
    std::vector<int> in_range_tx_;
    std::vector<double> exp_c_over_sigma_;
    std::optional<StateSpace> space_;
    std::vector<double> occupancy_;

    double now_ = 0.0;
    std::uint64_t events_ = 0;
    double next_tick_ = 0.0;
    std::int64_t tick_index_ = 0;
    std::size_t det_tx_ = 0;
    bool pending_warmup_ = false;
    double measure_start_ = 0.0;

    double groupput_time_ = 0.0;
    double anyput_time_ = 0.0;
    double collided_time_ = 0.0;
    StreamingMean burst_stats_;
    StreamingMean run_stats_;
    StreamingMean latency_stats_;
    std::vector<double> bursts_;
    std::vector<double> latencies_;
    std::vector<std::vector<double>> multiplier_trace_;
    std::vector<double> multiplier_trace_times_;
};

}  // namespace

SimMetrics run_simulation(const SimConfig& config) {
    config.validate();
    Simulation sim(config);
    return sim.run();
}

DetailedBalanceReport verify_detailed_balance(const NetworkConfig& config, const Multipliers& eta,
                                              double sigma, ProtocolVariant variant,
                                              ThroughputMode mode) {
    config.validate();
    if (!config.topology.is_clique()) {
        throw std::invalid_argument("verify_detailed_balance requires a clique topology");
    }
    const int n = config.node_count();
    if (n > 8) throw std::invalid_argument("detailed-balance audit supports <= 8 nodes");
    eta.validate(n);
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");

    const StateSpace space(n);
    const StateDistribution dist = steady_state_distribution(config, eta, sigma, mode);

    DetailedBalanceReport report;
    auto check_pair = [&](const NetworkState& w, const NetworkState& wp, double r_fwd,
                          double r_bwd) {
        if (r_fwd == 0.0 && r_bwd == 0.0) return;
        const std::size_t a = space.index_of(w);
        const std::size_t b = space.index_of(wp);
        const double log_lhs = dist.log_weights[a] + std::log(r_fwd);
        const double log_rhs = dist.log_weights[b] + std::log(r_bwd);
        const double violation = std::fabs(std::expm1(log_lhs - log_rhs));
        ++report.pairs_checked;
        if (violation > report.max_relative_violation) {
            report.max_relative_violation = violation;
            report.worst_pair = to_string(w) + "->" + to_string(wp);
        }
    };

    for (const NetworkState& w : space.states()) {
        const ListenerStats stats = listener_stats(w);
        const bool clear = !stats.one_transmitter;
        for (int i = 0; i < n; ++i) {
            NodeRuntime rt;
            rt.multiplier = eta.eta[i];
            rt.params = config.nodes[i];
            NetworkState wp = w;
            if (w[i] == NodeState::Sleep) {
                wp[i] = NodeState::Listen;
                const RateSet fwd = transition_rates(rt, sigma, clear,
                                                     ListenerEstimate::from_count(0), variant,
                                                     mode);
                const RateSet bwd = transition_rates(rt, sigma, clear,
                                                     ListenerEstimate::from_count(0), variant,
                                                     mode);
                check_pair(w, wp, fwd.sleep_to_listen, bwd.listen_to_sleep);
            } else if (w[i] == NodeState::Listen && clear) {
                // listen -> transmit; the reverse rate sees the listeners of
                // the transmit-side state (everyone but i who listens).
                wp[i] = NodeState::Transmit;
                const int listeners_after = stats.listeners - 1;
                const RateSet fwd = transition_rates(
                    rt, sigma, clear, ListenerEstimate::from_count(listeners_after), variant,
                    mode);
                const RateSet bwd = transition_rates(
                    rt, sigma, true, ListenerEstimate::from_count(listeners_after), variant,
                    mode);
                check_pair(w, wp, fwd.listen_to_transmit, bwd.transmit_to_listen);
            }
        }
    }
    return report;
}

}  // namespace econcast
