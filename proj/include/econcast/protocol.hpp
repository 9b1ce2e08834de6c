#pragma once

#include <cstdint>

#include "econcast/oracle.hpp"
#include "econcast/state_space.hpp"

namespace econcast {

enum class ProtocolVariant { Capture, NonCapture };

/// Exponential transition rates of one node, in events per packet time.
/// With the carrier busy (carrier_clear = 0) every rate out of sleep or
/// listen is zero; the transmit release rate is never gated.
struct RateSet {
    double sleep_to_listen = 0.0;
    double listen_to_sleep = 0.0;
    double listen_to_transmit = 0.0;
    double transmit_to_listen = 0.0;
};

/// Estimated number of active listeners (c-hat) and existence flag
/// (gamma-hat). Derived from one observation, so any_estimate is simply
/// count_estimate >= 1.
struct ListenerEstimate {
    int count_estimate = 0;
    bool any_estimate = false;

    static ListenerEstimate from_count(int c) { return {c, c >= 1}; }
};

/// Per-node protocol state: Lagrange multiplier, virtual battery and the
/// bookkeeping for interval-based multiplier updates.
struct NodeRuntime {
    double multiplier = 0.0;               // eta, >= 0
    double battery = 0.0;                  // b(t), joules
    double battery_at_interval_start = 0.0;
    std::int64_t interval_index = 0;
    NodePowerProfile params;
};

/// EconCast transition rates:
///   sl = A exp(-eta L / sigma)
///   ls = A
///   lx = A exp(eta (L - X) / sigma)              (capture)
///        A exp((eta (L - X) + c-hat) / sigma)    (non-capture)
///   xl = exp(-c-hat / sigma)                     (capture)
///        1                                       (non-capture)
/// Anyput mode substitutes gamma-hat for c-hat.
RateSet transition_rates(const NodeRuntime& runtime, double sigma, bool carrier_clear,
                         const ListenerEstimate& est, ProtocolVariant variant,
                         ThroughputMode mode);

/// eta[k] = max(0, eta[k-1] - delta_k / tau_k * (b[k] - b[k-1])); advances
/// the interval index and re-bases the battery reference. Returns the new
/// multiplier.
double update_multiplier(NodeRuntime& runtime, double delta_k, double tau_k, double battery_end);

/// Probability that a capture-mode transmitter sends another back-to-back
/// packet: 1 - exp(-c-hat/sigma), or 1 - exp(-gamma-hat/sigma) in anyput.
double transmit_continuation_probability(const ListenerEstimate& est, double sigma,
                                         ThroughputMode mode);

}  // namespace econcast
