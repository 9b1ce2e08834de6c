#pragma once

#include <vector>

#include "econcast/oracle.hpp"
#include "econcast/state_space.hpp"

namespace econcast {

struct Multipliers {
    std::vector<double> eta;  // one nonnegative multiplier per node

    static Multipliers zeros(int n) { return Multipliers{std::vector<double>(n, 0.0)}; }
    void validate(int n) const;
};

/// Exact Gibbs distribution over the canonical state space, kept in log
/// space; exponents reach magnitude ~N/sigma so weights are never
/// exponentiated before the log-sum-exp normalization.
struct StateDistribution {
    int node_count = 0;
    std::vector<double> log_weights;    // (T_w - sum eta*cost)/sigma
    std::vector<double> probabilities;  // exp(log_weights - log_partition)
    double log_partition = 0.0;
};

/// pi_w proportional to exp[(T_w - sum_{i listening} eta_i L_i
///                                - sum_{i transmitting} eta_i X_i)/sigma].
StateDistribution steady_state_distribution(const NetworkConfig& config, const Multipliers& eta,
                                            double sigma, ThroughputMode mode);

/// Per-node listen/transmit marginals of a distribution.
struct MarginalFractions {
    std::vector<double> alpha;
    std::vector<double> beta;
};
MarginalFractions marginal_fractions(const StateDistribution& dist, const NetworkConfig& config);

/// Expected throughput plus sigma times Shannon entropy (nats), 0*log 0 = 0.
double p4_objective(const StateDistribution& dist, double sigma, ThroughputMode mode,
                    const NetworkConfig& config);

/// Gradient of the dual: rho_i - (alpha_i L_i + beta_i X_i) with marginals
/// taken from the eta-induced distribution.
std::vector<double> dual_gradient(const NetworkConfig& config, const Multipliers& eta,
                                  double sigma, ThroughputMode mode);

struct StepRule {
    enum class Kind {
        /// Armijo backtracking on the exact dual function (default; the plain
        /// 1/k schedule stalls on the flat dual curvature of
        /// energy-constrained instances).
        Adaptive,
        /// delta_k = scale / k
        Harmonic,
        /// delta_k = scale / ((k+1) ln(k+1)), paired with growing intervals
        LogHarmonic,
        /// delta_k = scale
        Constant,
    };
    Kind kind = Kind::Adaptive;
    /// Step scale in power units normalized by max(L_i, X_i).
    double scale = 1.0;

    static StepRule adaptive() { return {}; }
    static StepRule harmonic(double scale = 1.0) { return {Kind::Harmonic, scale}; }
    static StepRule log_harmonic(double scale = 1.0) { return {Kind::LogHarmonic, scale}; }
    static StepRule constant(double scale) { return {Kind::Constant, scale}; }
};

struct GibbsIterate {
    int iteration = 0;
    std::vector<double> eta;
    double throughput = 0.0;
    std::vector<double> power_slack;  // rho_i - consumption_i, watts
};

struct GibbsResult {
    Multipliers multipliers;
    StateDistribution distribution;
    double throughput = 0.0;  // sum pi_w T_w
    double entropy = 0.0;     // nats
    double objective = 0.0;   // throughput + sigma * entropy
    double sigma = 0.0;
    ThroughputMode mode = ThroughputMode::Groupput;
    bool converged = false;
    int iterations = 0;
    std::vector<GibbsIterate> trace;
};

/// Dual gradient descent for the sigma-perturbed problem: starts from
/// eta = 0 and iterates eta_i(k) = [eta_i(k-1) - delta_k (rho_i -
/// alpha_i(k) L_i - beta_i(k) X_i)]^+, with the distribution computed from
/// eta(k-1) each round. Non-convergence is reported in the result, not
/// thrown. Stops when both the worst KKT power violation and the multiplier
/// change fall below stop_tol (in normalized power units).
GibbsResult gradient_descent(const NetworkConfig& config, double sigma, ThroughputMode mode,
                             const StepRule& step_rule = StepRule::adaptive(),
                             int max_iters = 100000, double stop_tol = 1e-7);

}  // namespace econcast
