#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "econcast/gibbs.hpp"
#include "econcast/oracle.hpp"
#include "econcast/protocol.hpp"
#include "econcast/rng.hpp"
#include "econcast/state_space.hpp"

namespace econcast {

enum class EstimatorKind { Perfect, PingBased };

struct SimConfig {
    NetworkConfig network;
    double sigma = 0.5;
    ProtocolVariant variant = ProtocolVariant::Capture;
    ThroughputMode mode = ThroughputMode::Groupput;
    double duration = 0.0;  // simulated seconds
    /// Metrics accumulate only after this boundary; multiplier adaptation and
    /// battery dynamics run from time zero regardless.
    double warmup = 0.0;
    std::uint64_t seed = 0;
    double packet_length = 1e-3;  // seconds; also the unit time of the rates

    /// Multiplier update step and interval (Eq.-15 bookkeeping). The step is
    /// dimensionless: each node's effective step is delta divided by the
    /// square of its peak consumption level, which keeps the update useful
    /// across power scales.
    double delta = 0.01;
    double tau = 10.0;  // seconds
    /// Slow log-harmonic growing schedule: delta_k = delta/((k+1) ln(k+1)),
    /// tau_k = k * tau. Default is the constant-(delta, tau) practical choice.
    bool log_harmonic_schedule = false;

    EstimatorKind estimator = EstimatorKind::Perfect;
    double ping_interval = 8e-3;    // seconds
    double ping_length = 0.4e-3;    // seconds
    /// The transmitter spends the pinging interval listening for pings;
    /// by default that time is charged as listen time.
    bool ping_interval_counts_as_listen = true;

    /// When set, multipliers stay fixed at these values and battery-driven
    /// updates are disabled.
    std::optional<Multipliers> freeze_multipliers;

    /// Warm-start multipliers for the adaptive protocol (default zeros, the
    /// cold start of Algorithm 1). Ignored when freeze_multipliers is set.
    std::optional<Multipliers> initial_multipliers;

    /// Optional battery clamp (floor, ceiling), joules. Unset = unbounded.
    std::optional<double> battery_floor;
    std::optional<double> battery_ceiling;

    /// Collect empirical per-state occupancy (cliques with <= 8 nodes).
    bool collect_occupancy = false;

    /// Stop after this many events if nonzero, even before `duration`.
    std::uint64_t max_events = 0;

    /// Retention cap for burst/latency sample vectors; streaming aggregates
    /// cover the full run regardless.
    std::size_t sample_cap = 1 << 20;
    /// Keep at most this many multiplier snapshots (evenly strided).
    std::size_t multiplier_trace_cap = 4096;

    /// Optional event trace sink; rows "time,node,old,new".
    std::ostream* event_trace = nullptr;

    void validate() const;
};

struct SimMetrics {
    double groupput = 0.0;
    double anyput = 0.0;
    double sim_time = 0.0;
    std::uint64_t events = 0;

    /// Packets per burst, per receiver (possibly truncated to sample_cap).
    std::vector<double> burst_lengths;
    std::uint64_t burst_count = 0;
    double burst_mean = 0.0;

    /// Channel-side capture runs with at least one successful receiver: the
    /// statistic the closed-form burst length describes. The per-receiver
    /// mean above weights a run once per listener and is systematically
    /// larger whenever several nodes listen at once.
    std::uint64_t burst_run_count = 0;
    double burst_run_mean = 0.0;

    /// Seconds between consecutive bursts at a receiver when the gap
    /// contains at least one sleep period of that receiver.
    std::vector<double> latencies;
    std::uint64_t latency_count = 0;
    double latency_mean = 0.0;

    std::vector<double> per_node_energy_rate;     // watts, consumption
    std::vector<double> listen_fraction;          // empirical alpha-hat
    std::vector<double> transmit_fraction;        // empirical beta-hat
    std::vector<double> final_multipliers;
    std::vector<double> final_battery;            // joules
    std::vector<std::vector<double>> multiplier_trace;
    std::vector<double> multiplier_trace_times;

    /// Empirical state occupancy in canonical order (when collected).
    std::vector<double> occupancy;

    /// Receiver-seconds voided by overlapping transmissions (graphs only).
    double collided_time = 0.0;
};

SimMetrics run_simulation(const SimConfig& config);

/// Ping-based listener estimation: each listener starts one ping uniformly
/// in [0, ping_interval - ping_length]; pings overlapping any other ping are
/// lost and the estimate counts the surviving ones.
ListenerEstimate estimate_listeners_ping(int listening_nodes, Rng& rng, const SimConfig& config);

struct DetailedBalanceReport {
    double max_relative_violation = 0.0;
    std::size_t pairs_checked = 0;
    std::string worst_pair;
};

/// Exhaustive detailed-balance audit: for every ordered state pair reachable
/// by one node's transition, checks pi_w r(w,w') = pi_w' r(w',w) with pi
/// from the Gibbs module and r from the protocol rates (ground-truth
/// carrier and listener counts derived from the state). Clique, N <= 8.
DetailedBalanceReport verify_detailed_balance(const NetworkConfig& config, const Multipliers& eta,
                                              double sigma, ProtocolVariant variant,
                                              ThroughputMode mode);

}  // namespace econcast
