#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "econcast/gibbs.hpp"
#include "econcast/oracle.hpp"
#include "econcast/rng.hpp"
#include "econcast/simulator.hpp"
#include "econcast/state_space.hpp"

namespace econcast {

struct BurstinessReport {
    double analytic_mean = 0.0;   // packets
    double empirical_mean = 0.0;  // packets, from simulated capture runs
    double relative_gap = 0.0;    // |empirical - analytic| / analytic
    ThroughputMode mode = ThroughputMode::Groupput;
    double sigma = 0.0;
};

/// Mean burst length of the capture protocol under a converged
/// sigma-perturbed distribution. Groupput averages the per-state
/// continuation weights over the states with a successful reception;
/// anyput is exp(1/sigma) for any network.
double analytic_burst_length(const StateDistribution& dist, double sigma, ThroughputMode mode,
                             const NetworkConfig& config);

BurstinessReport burstiness_report(const StateDistribution& dist, double sigma,
                                   ThroughputMode mode, const NetworkConfig& config,
                                   const SimMetrics& metrics);

struct LatencyReport {
    double mean = 0.0;
    double p99 = 0.0;  // nearest-rank
    std::vector<std::pair<double, double>> cdf;  // (latency, cumulative fraction)
};

LatencyReport latency_report(const SimMetrics& metrics);

/// Heterogeneous network sampler: listen/transmit costs uniform on
/// [510-h, 490+h] microwatts, budgets log-uniform with median 10 microwatts
/// spreading as h grows; h = 10 is the homogeneous endpoint.
NetworkConfig sample_heterogeneous_network(double h, int n, Rng& rng);

struct RatioSample {
    double label = 0.0;  // h, or any swept x-value
    double sigma = 0.0;
    double achievable = 0.0;          // T^sigma
    double oracle = 0.0;              // T*
    std::optional<double> simulated;  // T~sigma when available
};

struct NormalizedRow {
    double label = 0.0;
    double sigma = 0.0;
    int replicates = 0;
    double mean_ratio = 0.0;      // mean of T^sigma / T*
    double ci_half_width = 0.0;   // 1.96 * stderr; 0 (degenerate) for one sample
    bool degenerate = false;      // single replicate
    std::optional<double> mean_sim_ratio;  // mean of T~sigma / T*
    std::optional<double> sim_ci_half_width;
};

/// Groups samples by (label, sigma) and reports mean ratios with a
/// normal-approximation 95% confidence interval.
std::vector<NormalizedRow> normalized_report(const std::vector<RatioSample>& samples);

}  // namespace econcast
