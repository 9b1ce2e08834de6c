#include "econcast/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace econcast {

void Multipliers::validate(int n) const {
    if (eta.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("multiplier vector has " + std::to_string(eta.size()) +
                                    " entries for " + std::to_string(n) + " nodes");
    }
    for (double e : eta) {
        if (!(e >= 0)) throw std::invalid_argument("multipliers must be nonnegative");
    }
}

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0)) throw std::domain_error("sigma must be > 0");
}

void require_clique(const NetworkConfig& config, const char* op) {
    if (!config.topology.is_clique()) {
        throw std::invalid_argument(std::string(op) + " requires a clique topology");
    }
}

double log_sum_exp(const std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

}  // namespace

StateDistribution steady_state_distribution(const NetworkConfig& config, const Multipliers& eta,
                                            double sigma, ThroughputMode mode) {
    config.validate();
    require_clique(config, "steady_state_distribution");
    check_sigma(sigma);
    const int n = config.node_count();
    eta.validate(n);

    const StateSpace space(n);
    StateDistribution dist;
    dist.node_count = n;
    dist.log_weights.resize(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) {
        const NetworkState& w = space.state(s);
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            if (w[i] == NodeState::Listen) {
                cost += eta.eta[i] * config.nodes[i].listen_cost;
            } else if (w[i] == NodeState::Transmit) {
                cost += eta.eta[i] * config.nodes[i].transmit_cost;
            }
        }
        dist.log_weights[s] = (state_throughput(w, mode) - cost) / sigma;
    }
    dist.log_partition = log_sum_exp(dist.log_weights);
    dist.probabilities.resize(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) {
        dist.probabilities[s] = std::exp(dist.log_weights[s] - dist.log_partition);
    }
    return dist;
}

MarginalFractions marginal_fractions(const StateDistribution& dist, const NetworkConfig& config) {
    const int n = config.node_count();
    if (dist.node_count != n ||
        dist.probabilities.size() != collision_free_state_count(n)) {
        throw std::invalid_argument("distribution is not aligned with this network's state space");
    }
    const StateSpace space(n);
    MarginalFractions m;
    m.alpha.assign(n, 0.0);
    m.beta.assign(n, 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) {
        const NetworkState& w = space.state(s);
        const double p = dist.probabilities[s];
        for (int i = 0; i < n; ++i) {
            if (w[i] == NodeState::Listen) {
                m.alpha[i] += p;
            } else if (w[i] == NodeState::Transmit) {
                m.beta[i] += p;
            }
        }
    }
    return m;
}

double p4_objective(const StateDistribution& dist, double sigma, ThroughputMode mode,
                    const NetworkConfig& config) {
    if (!(sigma >= 0)) throw std::domain_error("sigma must be >= 0");
    const int n = config.node_count();
    if (dist.node_count != n ||
        dist.probabilities.size() != collision_free_state_count(n)) {
        throw std::invalid_argument("distribution is not aligned with this network's state space");
    }
    const StateSpace space(n);
    double tput = 0.0, entropy = 0.0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        const double p = dist.probabilities[s];
        if (p > 0) {
            tput += p * state_throughput(space.state(s), mode);
            entropy -= p * std::log(p);
        }
    }
    return tput + sigma * entropy;
}

std::vector<double> dual_gradient(const NetworkConfig& config, const Multipliers& eta,
                                  double sigma, ThroughputMode mode) {
    const StateDistribution dist = steady_state_distribution(config, eta, sigma, mode);
    const MarginalFractions m = marginal_fractions(dist, config);
    const int n = config.node_count();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = config.nodes[i].rho -
               (m.alpha[i] * config.nodes[i].listen_cost +
                m.beta[i] * config.nodes[i].transmit_cost);
    }
    return g;
}

namespace {

// Internal solver state in normalized power units (all of rho, L, X divided
// by max(L_i, X_i)); the dual is badly scaled otherwise because eta's natural
// magnitude is sigma/L while gradients are of order rho.
struct DualEvaluator {
    const StateSpace space;
    double sigma;
    std::vector<double> tput;                    // T_w per state
    std::vector<std::vector<std::uint8_t>> st;   // state code per (state, node)
    std::vector<double> rho_n, L_n, X_n;         // normalized powers
    int n;

    DualEvaluator(const NetworkConfig& config, double sigma_, ThroughputMode mode)
        : space(config.node_count()), sigma(sigma_), n(config.node_count()) {
        double peak = 0.0;
        for (const auto& p : config.nodes) {
            peak = std::max({peak, p.listen_cost, p.transmit_cost});
        }
        for (const auto& p : config.nodes) {
            rho_n.push_back(p.rho / peak);
            L_n.push_back(p.listen_cost / peak);
            X_n.push_back(p.transmit_cost / peak);
        }
        tput.resize(space.size());
        st.assign(space.size(), std::vector<std::uint8_t>(n));
        for (std::size_t s = 0; s < space.size(); ++s) {
            const NetworkState& w = space.state(s);
            tput[s] = state_throughput(w, mode);
            for (int i = 0; i < n; ++i) st[s][i] = static_cast<std::uint8_t>(w[i]);
        }
    }

    struct Eval {
        double dual = 0.0;                // sigma*logZ + eta.rho (normalized units)
        std::vector<double> gradient;     // rho - consumption (normalized)
        std::vector<double> alpha, beta;  // marginals
        std::vector<double> probabilities;
        std::vector<double> log_weights;
        double log_partition = 0.0;
        double throughput = 0.0;
    };

    Eval evaluate(const std::vector<double>& eta) const {
        Eval e;
        e.log_weights.resize(space.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < space.size(); ++s) {
            double cost = 0.0;
            const auto& row = st[s];
            for (int i = 0; i < n; ++i) {
                if (row[i] == 1) {
                    cost += eta[i] * L_n[i];
                } else if (row[i] == 2) {
                    cost += eta[i] * X_n[i];
                }
            }
            e.log_weights[s] = (tput[s] - cost) / sigma;
            mx = std::max(mx, e.log_weights[s]);
        }
        double z = 0.0;
        for (double lw : e.log_weights) z += std::exp(lw - mx);
        e.log_partition = mx + std::log(z);
        e.probabilities.resize(space.size());
        e.alpha.assign(n, 0.0);
        e.beta.assign(n, 0.0);
        for (std::size_t s = 0; s < space.size(); ++s) {
            const double p = std::exp(e.log_weights[s] - e.log_partition);
            e.probabilities[s] = p;
            e.throughput += p * tput[s];
            const auto& row = st[s];
            for (int i = 0; i < n; ++i) {
                if (row[i] == 1) {
                    e.alpha[i] += p;
                } else if (row[i] == 2) {
                    e.beta[i] += p;
                }
            }
        }
        e.dual = sigma * e.log_partition;
        e.gradient.resize(n);
        for (int i = 0; i < n; ++i) {
            e.gradient[i] = rho_n[i] - (e.alpha[i] * L_n[i] + e.beta[i] * X_n[i]);
            e.dual += eta[i] * rho_n[i];
        }
        return e;
    }
};

double schedule_delta(const StepRule& rule, int k) {
    switch (rule.kind) {
        case StepRule::Kind::Harmonic: return rule.scale / k;
        case StepRule::Kind::LogHarmonic: return rule.scale / ((k + 1) * std::log(k + 1.0));
        case StepRule::Kind::Constant: return rule.scale;
        case StepRule::Kind::Adaptive: break;
    }
    return rule.scale;
}

double kkt_violation(const std::vector<double>& eta, const std::vector<double>& g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        worst = std::max(worst, eta[i] > 0 ? std::fabs(g[i]) : std::max(0.0, -g[i]));
    }
    return worst;
}

}  // namespace

GibbsResult gradient_descent(const NetworkConfig& config, double sigma, ThroughputMode mode,
                             const StepRule& step_rule, int max_iters, double stop_tol) {
    config.validate();
    require_clique(config, "gradient_descent");
    check_sigma(sigma);
    const int n = config.node_count();
    const DualEvaluator dual(config, sigma, mode);
    double peak = 0.0;
    for (const auto& p : config.nodes) peak = std::max({peak, p.listen_cost, p.transmit_cost});

    std::vector<double> eta(n, 0.0);  // normalized units; eta_true = eta / peak
    DualEvaluator::Eval cur = dual.evaluate(eta);
    double step = 1.0;  // adaptive backtracking state

    GibbsResult result;
    result.sigma = sigma;
    result.mode = mode;
    // Early iterations are kept densely, later ones thinned, so traces stay
    // bounded on long schedule-driven runs.
    const int trace_stride = std::max(1, max_iters / 2048);
    auto record = [&](int k) {
        if (k > 256 && k % trace_stride != 0) return;
        GibbsIterate it;
        it.iteration = k;
        it.eta.resize(n);
        it.power_slack.resize(n);
        for (int i = 0; i < n; ++i) {
            it.eta[i] = eta[i] / peak;
            it.power_slack[i] = cur.gradient[i] * peak;
        }
        it.throughput = cur.throughput;
        result.trace.push_back(std::move(it));
    };

    int k = 0;
    for (k = 1; k <= max_iters; ++k) {
        std::vector<double> next(n);
        DualEvaluator::Eval next_eval;
        if (step_rule.kind == StepRule::Kind::Adaptive) {
            // Projected gradient with Armijo backtracking on the exact dual.
            bool accepted = false;
            for (int tries = 0; tries < 200 && !accepted; ++tries) {
                double decrease = 0.0;
                for (int i = 0; i < n; ++i) {
                    next[i] = std::max(0.0, eta[i] - step * cur.gradient[i]);
                    decrease += cur.gradient[i] * (eta[i] - next[i]);
                }
                next_eval = dual.evaluate(next);
                if (next_eval.dual <= cur.dual - 1e-4 * decrease) {
                    accepted = true;
                    step *= 1.6;
                } else {
                    step *= 0.5;
                }
            }
            if (!accepted) {  // step underflow: no further descent possible
                result.converged = kkt_violation(eta, cur.gradient) < stop_tol;
                break;
            }
        } else {
            const double delta = schedule_delta(step_rule, k);
            for (int i = 0; i < n; ++i) {
                next[i] = std::max(0.0, eta[i] - delta * cur.gradient[i]);
            }
            next_eval = dual.evaluate(next);
        }
        double eta_change = 0.0;
        for (int i = 0; i < n; ++i) eta_change = std::max(eta_change, std::fabs(next[i] - eta[i]));
        eta = std::move(next);
        cur = std::move(next_eval);
        record(k);
        if (kkt_violation(eta, cur.gradient) < stop_tol && eta_change < stop_tol) {
            result.converged = true;
            break;
        }
    }
    result.iterations = std::min(k, max_iters);

    result.multipliers.eta.resize(n);
    for (int i = 0; i < n; ++i) result.multipliers.eta[i] = eta[i] / peak;
    result.distribution = steady_state_distribution(config, result.multipliers, sigma, mode);
    const StateSpace space(n);
    for (std::size_t s = 0; s < space.size(); ++s) {
        const double p = result.distribution.probabilities[s];
        if (p > 0) {
            result.throughput += p * state_throughput(space.state(s), mode);
            result.entropy -= p * std::log(p);
        }
    }
    result.objective = result.throughput + sigma * result.entropy;
    return result;
}

}  // namespace econcast
