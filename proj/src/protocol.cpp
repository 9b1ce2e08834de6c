#include "econcast/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace econcast {

namespace {

double estimate_value(const ListenerEstimate& est, ThroughputMode mode) {
    return mode == ThroughputMode::Groupput ? static_cast<double>(est.count_estimate)
                                            : (est.any_estimate ? 1.0 : 0.0);
}

}  // namespace

RateSet transition_rates(const NodeRuntime& runtime, double sigma, bool carrier_clear,
                         const ListenerEstimate& est, ProtocolVariant variant,
                         ThroughputMode mode) {
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");
    const double a = carrier_clear ? 1.0 : 0.0;
    const double eta = runtime.multiplier;
    const double L = runtime.params.listen_cost;
    const double X = runtime.params.transmit_cost;
    const double c_hat = estimate_value(est, mode);

    RateSet r;
    r.sleep_to_listen = a * std::exp(-eta * L / sigma);
    r.listen_to_sleep = a;
    if (variant == ProtocolVariant::Capture) {
        r.listen_to_transmit = a * std::exp(eta * (L - X) / sigma);
        r.transmit_to_listen = std::exp(-c_hat / sigma);
    } else {
        r.listen_to_transmit = a * std::exp((eta * (L - X) + c_hat) / sigma);
        r.transmit_to_listen = 1.0;
    }
    return r;
}

double update_multiplier(NodeRuntime& runtime, double delta_k, double tau_k, double battery_end) {
    if (!(tau_k > 0)) throw std::domain_error("tau_k must be > 0");
    const double delta_b = battery_end - runtime.battery_at_interval_start;
    runtime.multiplier = std::max(0.0, runtime.multiplier - delta_k / tau_k * delta_b);
    runtime.battery_at_interval_start = battery_end;
    ++runtime.interval_index;
    return runtime.multiplier;
}

double transmit_continuation_probability(const ListenerEstimate& est, double sigma,
                                         ThroughputMode mode) {
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");
    return 1.0 - std::exp(-estimate_value(est, mode) / sigma);
}

}  // namespace econcast
