#include "econcast/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace econcast {

double analytic_burst_length(const StateDistribution& dist, double sigma, ThroughputMode mode,
                             const NetworkConfig& config) {
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");
    const int n = config.node_count();
    if (dist.node_count != n ||
        dist.probabilities.size() != collision_free_state_count(n)) {
        throw std::invalid_argument("distribution is not aligned with this network's state space");
    }
    const StateSpace space(n);
    double mass = 0.0, ends = 0.0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        const ListenerStats st = listener_stats(space.state(s));
        if (!st.one_transmitter || !st.any_listener) continue;
        const double p = dist.probabilities[s];
        mass += p;
        ends += p * std::exp(-static_cast<double>(st.listeners) / sigma);
    }
    if (mass <= 0.0) {
        throw std::domain_error("burst length undefined: no mass on receiving states");
    }
    if (mode == ThroughputMode::Anyput) return std::exp(1.0 / sigma);
    return mass / ends;
}

BurstinessReport burstiness_report(const StateDistribution& dist, double sigma,
                                   ThroughputMode mode, const NetworkConfig& config,
                                   const SimMetrics& metrics) {
    BurstinessReport r;
    r.mode = mode;
    r.sigma = sigma;
    r.analytic_mean = analytic_burst_length(dist, sigma, mode, config);
    r.empirical_mean = metrics.burst_run_mean;
    r.relative_gap = std::fabs(r.empirical_mean - r.analytic_mean) / r.analytic_mean;
    return r;
}

LatencyReport latency_report(const SimMetrics& metrics) {
    if (metrics.latencies.empty()) {
        throw std::invalid_argument("no latency samples; run a longer simulation");
    }
    std::vector<double> sorted = metrics.latencies;
    std::sort(sorted.begin(), sorted.end());
    LatencyReport rep;
    double sum = 0.0;
    for (double v : sorted) sum += v;
    rep.mean = sum / static_cast<double>(sorted.size());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(sorted.size())));
    rep.p99 = sorted[std::max<std::size_t>(rank, 1) - 1];
    rep.cdf.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        rep.cdf.emplace_back(sorted[k],
                             static_cast<double>(k + 1) / static_cast<double>(sorted.size()));
    }
    return rep;
}

NetworkConfig sample_heterogeneous_network(double h, int n, Rng& rng) {
    if (!(h >= 10.0 && h <= 250.0)) {
        throw std::domain_error("heterogeneity h must lie in [10, 250]");
    }
    if (n < 1) throw std::invalid_argument("need n >= 1");
    const double micro = 1e-6;
    NetworkConfig cfg;
    cfg.topology = Topology::clique(n);
    cfg.nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        NodePowerProfile p;
        p.listen_cost = rng.uniform(510.0 - h, 490.0 + h) * micro;
        p.transmit_cost = rng.uniform(510.0 - h, 490.0 + h) * micro;
        // -log(h/100) written as log(100/h) so the h = 10 interval is
        // exactly degenerate in floating point.
        const double hp = rng.uniform(std::log(100.0 / h), std::log(h));
        p.rho = std::exp(hp) * micro;
        cfg.nodes.push_back(p);
    }
    return cfg;
}

std::vector<NormalizedRow> normalized_report(const std::vector<RatioSample>& samples) {
    std::map<std::pair<double, double>, std::vector<const RatioSample*>> groups;
    for (const auto& s : samples) {
        if (!(s.oracle > 0)) {
            throw std::invalid_argument("normalized_report needs positive oracle throughput");
        }
        groups[{s.label, s.sigma}].push_back(&s);
    }
    auto mean_ci = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        if (v.size() < 2) return std::pair<double, double>{mean, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                         static_cast<double>(v.size()));
        return std::pair<double, double>{mean, 1.96 * stderr_};
    };
    std::vector<NormalizedRow> rows;
    for (const auto& [key, members] : groups) {
        NormalizedRow row;
        row.label = key.first;
        row.sigma = key.second;
        row.replicates = static_cast<int>(members.size());
        row.degenerate = members.size() == 1;
        std::vector<double> ratios, sim_ratios;
        for (const RatioSample* s : members) {
            ratios.push_back(s->achievable / s->oracle);
            if (s->simulated) sim_ratios.push_back(*s->simulated / s->oracle);
        }
        std::tie(row.mean_ratio, row.ci_half_width) = mean_ci(ratios);
        if (!sim_ratios.empty() && sim_ratios.size() == ratios.size()) {
            auto [m, ci] = mean_ci(sim_ratios);
            row.mean_sim_ratio = m;
            row.sim_ci_half_width = ci;
        } else if (!sim_ratios.empty()) {
            throw std::invalid_argument("simulated ratios must be present for all or no samples");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace econcast
