#include "econcast/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "econcast/lp.hpp"

namespace econcast {

void NodePowerProfile::validate() const {
    if (!(rho > 0)) throw std::invalid_argument("power budget rho must be > 0");
    if (!(listen_cost > 0)) throw std::invalid_argument("listen_cost must be > 0");
    if (!(transmit_cost > 0)) throw std::invalid_argument("transmit_cost must be > 0");
}

Topology Topology::clique(int n) {
    Topology t;
    t.kind = Kind::Clique;
    t.node_count = n;
    return t;
}

Topology Topology::graph(int n, std::vector<bool> adjacency) {
    Topology t;
    t.kind = Kind::Graph;
    t.node_count = n;
    t.adjacency = std::move(adjacency);
    t.validate();
    return t;
}

Topology Topology::grid(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    const int n = rows * cols;
    std::vector<bool> adj(static_cast<std::size_t>(n) * n, false);
    auto link = [&](int a, int b) {
        adj[static_cast<std::size_t>(a) * n + b] = true;
        adj[static_cast<std::size_t>(b) * n + a] = true;
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            if (c + 1 < cols) link(i, i + 1);
            if (r + 1 < rows) link(i, i + cols);
        }
    }
    return graph(n, std::move(adj));
}

bool Topology::adjacent(int i, int j) const {
    if (i == j) return false;
    if (kind == Kind::Clique) return true;
    return adjacency[static_cast<std::size_t>(i) * node_count + j];
}

std::vector<int> Topology::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < node_count; ++j) {
        if (adjacent(i, j)) out.push_back(j);
    }
    return out;
}

void Topology::validate() const {
    if (node_count < 1) throw std::invalid_argument("topology must have >= 1 node");
    if (kind == Kind::Clique) return;
    if (adjacency.size() != static_cast<std::size_t>(node_count) * node_count) {
        throw std::invalid_argument("adjacency must be node_count x node_count");
    }
    for (int i = 0; i < node_count; ++i) {
        if (adjacency[static_cast<std::size_t>(i) * node_count + i]) {
            throw std::invalid_argument("adjacency diagonal must be empty");
        }
        for (int j = 0; j < node_count; ++j) {
            if (adjacency[static_cast<std::size_t>(i) * node_count + j] !=
                adjacency[static_cast<std::size_t>(j) * node_count + i]) {
                throw std::invalid_argument("adjacency must be symmetric");
            }
        }
    }
}

bool NetworkConfig::homogeneous() const {
    for (const auto& p : nodes) {
        if (p.rho != nodes[0].rho || p.listen_cost != nodes[0].listen_cost ||
            p.transmit_cost != nodes[0].transmit_cost) {
            return false;
        }
    }
    return true;
}

void NetworkConfig::validate() const {
    if (nodes.empty()) throw std::invalid_argument("network must have >= 1 node");
    for (const auto& p : nodes) p.validate();
    topology.validate();
    if (topology.node_count != node_count()) {
        throw std::invalid_argument("topology node count (" + std::to_string(topology.node_count) +
                                    ") does not match node list (" + std::to_string(node_count()) +
                                    ")");
    }
}

NetworkConfig NetworkConfig::homogeneous_clique(int n, const NodePowerProfile& profile) {
    NetworkConfig cfg;
    cfg.nodes.assign(static_cast<std::size_t>(n), profile);
    cfg.topology = Topology::clique(n);
    return cfg;
}

namespace {

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

void require_clique(const NetworkConfig& config, const char* op) {
    if (!config.topology.is_clique()) {
        throw std::invalid_argument(std::string(op) +
                                    " requires a clique topology; use nonclique_bounds for graphs");
    }
}

// Groupput LP over [alpha(n), beta(n)]. The listen-coverage constraint is
// alpha_i <= sum of transmit fractions over `coverage(i)`; pass all-other
// nodes for cliques or the neighborhood for graphs. `cap_total_transmit`
// toggles the global single-transmitter constraint.
template <typename CoverageFn>
lp::Problem groupput_problem(const NetworkConfig& config, CoverageFn coverage,
                             bool cap_total_transmit) {
    const int n = config.node_count();
    lp::Problem p;
    p.num_vars = static_cast<std::size_t>(2 * n);
    p.objective.assign(p.num_vars, 0.0);
    for (int i = 0; i < n; ++i) p.objective[i] = 1.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(p.num_vars, 0.0);
        row[i] = config.nodes[i].listen_cost;
        row[n + i] = config.nodes[i].transmit_cost;
        p.add_row(std::move(row), config.nodes[i].rho);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(p.num_vars, 0.0);
        row[i] = 1.0;
        row[n + i] = 1.0;
        p.add_row(std::move(row), 1.0);
    }
    if (cap_total_transmit) {
        std::vector<double> row(p.num_vars, 0.0);
        for (int i = 0; i < n; ++i) row[n + i] = 1.0;
        p.add_row(std::move(row), 1.0);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(p.num_vars, 0.0);
        row[i] = 1.0;
        for (int j : coverage(i)) row[n + j] = -1.0;
        p.add_row(std::move(row), 0.0);
    }
    return p;
}

// For symmetric inputs the optimal face is permutation-invariant, so the
// per-node average of any optimum is itself optimal; it is the canonical
// representative reported for homogeneous cliques.
void symmetrize(std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    std::fill(v.begin(), v.end(), mean);
}

OracleSolution finish_groupput(const NetworkConfig& config, const lp::Solution& sol) {
    const int n = config.node_count();
    OracleSolution out;
    out.mode = ThroughputMode::Groupput;
    out.throughput = sol.value;
    out.duality_gap = sol.duality_gap;
    out.alpha.resize(n);
    out.beta.resize(n);
    for (int i = 0; i < n; ++i) {
        out.alpha[i] = clip01(sol.x[i]);
        out.beta[i] = clip01(sol.x[n + i]);
    }
    if (config.topology.is_clique() && config.homogeneous()) {
        symmetrize(out.alpha);
        symmetrize(out.beta);
    }
    return out;
}

}  // namespace

OracleSolution solve_groupput_lp(const NetworkConfig& config) {
    config.validate();
    require_clique(config, "solve_groupput_lp");
    const int n = config.node_count();
    auto others = [n](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j) {
            if (j != i) out.push_back(j);
        }
        return out;
    };
    lp::Problem p = groupput_problem(config, others, /*cap_total_transmit=*/true);
    // Among alternate optima prefer maximal total awake time, pinning the
    // budget-tight representative.
    std::vector<double> awake(p.num_vars, 1.0);
    return finish_groupput(config, lp::maximize_lexicographic(p, awake));
}

OracleSolution solve_anyput_lp(const NetworkConfig& config) {
    config.validate();
    require_clique(config, "solve_anyput_lp");
    const int n = config.node_count();
    // Variables: beta(n), then chi over ordered pairs (i,j), i != j; the
    // listen fractions alpha_j = sum_i chi_{i,j} are eliminated.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    lp::Problem p;
    p.num_vars = static_cast<std::size_t>(n) + pairs.size();
    p.objective.assign(p.num_vars, 0.0);
    for (int i = 0; i < n; ++i) p.objective[i] = 1.0;
    for (int j = 0; j < n; ++j) {  // budget: alpha_j L_j + beta_j X_j <= rho_j
        std::vector<double> row(p.num_vars, 0.0);
        row[j] = config.nodes[j].transmit_cost;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (pairs[k].second == j) row[n + k] = config.nodes[j].listen_cost;
        }
        p.add_row(std::move(row), config.nodes[j].rho);
    }
    for (int j = 0; j < n; ++j) {  // awake: alpha_j + beta_j <= 1
        std::vector<double> row(p.num_vars, 0.0);
        row[j] = 1.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (pairs[k].second == j) row[n + k] = 1.0;
        }
        p.add_row(std::move(row), 1.0);
    }
    {
        std::vector<double> row(p.num_vars, 0.0);
        for (int i = 0; i < n; ++i) row[i] = 1.0;
        p.add_row(std::move(row), 1.0);
    }
    for (int i = 0; i < n; ++i) {  // coverage: beta_i <= sum_j chi_{i,j}
        std::vector<double> row(p.num_vars, 0.0);
        row[i] = 1.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (pairs[k].first == i) row[n + k] = -1.0;
        }
        p.add_row(std::move(row), 0.0);
    }
    std::vector<double> awake(p.num_vars, 1.0);
    lp::Solution sol = lp::maximize_lexicographic(p, awake);

    OracleSolution out;
    out.mode = ThroughputMode::Anyput;
    out.throughput = sol.value;
    out.duality_gap = sol.duality_gap;
    out.beta.resize(n);
    out.alpha.assign(n, 0.0);
    std::vector<double> chi(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) out.beta[i] = clip01(sol.x[i]);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        chi[static_cast<std::size_t>(i) * n + j] = clip01(sol.x[n + k]);
        out.alpha[j] += sol.x[n + k];
    }
    for (double& a : out.alpha) a = clip01(a);
    if (config.homogeneous()) {
        symmetrize(out.alpha);
        symmetrize(out.beta);
        // matching symmetric pair fractions: alpha_j = sum_i chi_{i,j} and
        // beta_i <= sum_j chi_{i,j} both hold since sum(alpha) >= sum(beta)
        const double uniform = out.alpha[0] / static_cast<double>(n - 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                chi[static_cast<std::size_t>(i) * n + j] = i == j ? 0.0 : uniform;
            }
        }
    }
    out.pair_fractions = std::move(chi);
    return out;
}

OracleSolution homogeneous_closed_form(int n, const NodePowerProfile& profile,
                                       ThroughputMode mode) {
    profile.validate();
    if (n < 2) throw std::invalid_argument("closed form needs >= 2 nodes");
    const double L = profile.listen_cost;
    const double X = profile.transmit_cost;
    double alpha = 0.0, beta = 0.0, tput = 0.0;
    if (mode == ThroughputMode::Groupput) {
        beta = profile.rho / (X + (n - 1) * L);
        alpha = (n - 1) * beta;
        tput = n * alpha;
    } else {
        beta = profile.rho / (X + L);
        alpha = beta;
        tput = n * beta;
    }
    if (alpha + beta > 1.0) {
        throw std::domain_error(
            "profile is not energy-constrained enough for the closed form "
            "(alpha*+beta* = " +
            std::to_string(alpha + beta) + " > 1); solve the LP instead");
    }
    OracleSolution out;
    out.alpha.assign(static_cast<std::size_t>(n), alpha);
    out.beta.assign(static_cast<std::size_t>(n), beta);
    out.throughput = tput;
    out.mode = mode;
    return out;
}

NoncliqueBounds nonclique_bounds(const NetworkConfig& config) {
    config.validate();
    if (config.topology.is_clique()) {
        throw std::invalid_argument("nonclique_bounds requires a graph topology");
    }
    auto neighborhood = [&config](int i) { return config.topology.neighbors(i); };
    std::vector<double> awake(static_cast<std::size_t>(2 * config.node_count()), 1.0);
    lp::Problem lower_p = groupput_problem(config, neighborhood, /*cap_total_transmit=*/true);
    lp::Problem upper_p = groupput_problem(config, neighborhood, /*cap_total_transmit=*/false);
    NoncliqueBounds b;
    b.lower = finish_groupput(config, lp::maximize_lexicographic(lower_p, awake));
    b.upper = finish_groupput(config, lp::maximize_lexicographic(upper_p, awake));
    return b;
}

std::pair<std::int64_t, std::int64_t> rationalize(double v, std::int64_t max_denominator) {
    if (max_denominator < 1) throw std::invalid_argument("max_denominator must be >= 1");
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("rationalize expects v in [0,1]");
    // Continued-fraction convergents with a final semiconvergent candidate.
    std::int64_t h0 = 0, k0 = 1, h1 = 1, k1 = 0;
    double x = v;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(x);
        auto a = static_cast<std::int64_t>(fl);
        std::int64_t h2 = a * h1 + h0;
        std::int64_t k2 = a * k1 + k0;
        if (k2 > max_denominator) {
            // Largest admissible semiconvergent of the previous pair.
            const std::int64_t t = (max_denominator - k0) / std::max<std::int64_t>(k1, 1);
            const std::int64_t hs = t * h1 + h0;
            const std::int64_t ks = t * k1 + k0;
            if (ks >= 1 &&
                std::fabs(v - static_cast<double>(hs) / static_cast<double>(ks)) <
                    std::fabs(v - static_cast<double>(h1) / static_cast<double>(std::max<std::int64_t>(k1, 1)))) {
                return {hs, ks};
            }
            return {h1, std::max<std::int64_t>(k1, 1)};
        }
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        const double rem = x - fl;
        if (rem < 1e-15) break;
        x = 1.0 / rem;
    }
    return {h1, std::max<std::int64_t>(k1, 1)};
}

std::int64_t PeriodicSchedule::transmit_slots(int node) const {
    std::int64_t c = 0;
    for (const auto& slot : assignments) c += slot[node] == NodeState::Transmit;
    return c;
}

std::int64_t PeriodicSchedule::listen_slots(int node) const {
    std::int64_t c = 0;
    for (const auto& slot : assignments) c += slot[node] == NodeState::Listen;
    return c;
}

namespace {

constexpr std::int64_t kMaxPeriod = 1 << 20;
constexpr double kRationalResidualTol = 1e-9;

std::int64_t lcm_capped(std::int64_t a, std::int64_t b) {
    const std::int64_t g = std::gcd(a, b);
    const std::int64_t q = a / g;
    if (b > kMaxPeriod / q) return kMaxPeriod + 1;
    return q * b;
}

}  // namespace

PeriodicSchedule build_periodic_schedule(const OracleSolution& solution, double slot_length,
                                         std::int64_t max_denominator) {
    if (!(slot_length > 0)) throw std::invalid_argument("slot_length must be > 0");
    const int n = static_cast<int>(solution.alpha.size());
    if (n == 0 || solution.beta.size() != solution.alpha.size()) {
        throw std::invalid_argument("solution must carry matching alpha/beta vectors");
    }
    double worst_residual = 0.0;
    std::int64_t period = 1;
    std::vector<std::pair<std::int64_t, std::int64_t>> ra(n), rb(n);
    for (int i = 0; i < n; ++i) {
        ra[i] = rationalize(solution.alpha[i], max_denominator);
        rb[i] = rationalize(solution.beta[i], max_denominator);
        worst_residual = std::max(
            worst_residual,
            std::fabs(solution.alpha[i] - static_cast<double>(ra[i].first) / ra[i].second));
        worst_residual = std::max(
            worst_residual,
            std::fabs(solution.beta[i] - static_cast<double>(rb[i].first) / rb[i].second));
        period = lcm_capped(period, ra[i].second);
        period = lcm_capped(period, rb[i].second);
    }
    if (worst_residual > kRationalResidualTol || period > kMaxPeriod) {
        throw std::runtime_error(
            "schedule rationalization failed (worst residual " + std::to_string(worst_residual) +
            ", period " + std::to_string(period) + ", max denominator " +
            std::to_string(max_denominator) + ")");
    }
    std::vector<std::int64_t> tx(n), lis(n);
    std::int64_t total_tx = 0;
    for (int i = 0; i < n; ++i) {
        tx[i] = rb[i].first * (period / rb[i].second);
        lis[i] = ra[i].first * (period / ra[i].second);
        total_tx += tx[i];
    }
    if (total_tx > period) {
        throw std::runtime_error("solution transmit fractions exceed one transmitter per slot");
    }
    for (int i = 0; i < n; ++i) {
        if (lis[i] > total_tx - tx[i]) {
            throw std::runtime_error("node " + std::to_string(i) +
                                     " listens more than other nodes transmit; not schedulable");
        }
    }

    PeriodicSchedule sched;
    sched.period = period;
    sched.slot_length = slot_length;
    sched.assignments.assign(static_cast<std::size_t>(period),
                             std::vector<NodeState>(static_cast<std::size_t>(n), NodeState::Sleep));
    // Transmit slots dealt round-robin in node order.
    std::vector<std::int64_t> remaining = tx;
    std::int64_t cursor = 0;
    for (std::int64_t dealt = 0; dealt < total_tx;) {
        for (int i = 0; i < n && dealt < total_tx; ++i) {
            if (remaining[i] > 0) {
                sched.assignments[cursor++][i] = NodeState::Transmit;
                --remaining[i];
                ++dealt;
            }
        }
    }
    // Listen slots chosen greedily from other nodes' transmit slots.
    for (int i = 0; i < n; ++i) {
        std::int64_t need = lis[i];
        for (std::int64_t s = 0; s < period && need > 0; ++s) {
            auto& slot = sched.assignments[s];
            if (slot[i] != NodeState::Sleep) continue;
            bool other_tx = false;
            for (int j = 0; j < n; ++j) {
                if (j != i && slot[j] == NodeState::Transmit) {
                    other_tx = true;
                    break;
                }
            }
            if (other_tx) {
                slot[i] = NodeState::Listen;
                --need;
            }
        }
        if (need > 0) throw std::runtime_error("internal: listen slot assignment fell short");
    }
    return sched;
}

ScheduleAudit audit_schedule(const PeriodicSchedule& schedule, const NetworkConfig& config,
                             const OracleSolution& solution) {
    ScheduleAudit audit;
    const int n = config.node_count();
    const auto P = static_cast<double>(schedule.period);
    auto fail = [&audit](std::string msg) {
        audit.ok = false;
        audit.violations.push_back(std::move(msg));
    };
    for (int i = 0; i < n; ++i) {
        const auto want_tx = static_cast<std::int64_t>(std::llround(solution.beta[i] * P));
        const auto want_lis = static_cast<std::int64_t>(std::llround(solution.alpha[i] * P));
        if (schedule.transmit_slots(i) != want_tx) {
            fail("node " + std::to_string(i) + " transmit slots != round(beta*P)");
        }
        if (schedule.listen_slots(i) != want_lis) {
            fail("node " + std::to_string(i) + " listen slots != round(alpha*P)");
        }
        const double energy = (static_cast<double>(schedule.listen_slots(i)) *
                                   config.nodes[i].listen_cost +
                               static_cast<double>(schedule.transmit_slots(i)) *
                                   config.nodes[i].transmit_cost) *
                              schedule.slot_length;
        const double budget = config.nodes[i].rho * P * schedule.slot_length;
        if (energy > budget * (1.0 + 1e-9) + 1e-18) {
            fail("node " + std::to_string(i) + " spends more energy per period than it accrues");
        }
    }
    double tput = 0.0;
    for (const auto& slot : schedule.assignments) {
        int transmitters = 0, listeners = 0;
        for (int i = 0; i < n; ++i) {
            transmitters += slot[i] == NodeState::Transmit;
            listeners += slot[i] == NodeState::Listen;
        }
        if (transmitters > 1) fail("slot has more than one transmitter");
        if (listeners > 0 && transmitters != 1) {
            fail("listen slot without exactly one other transmitter");
        }
        if (transmitters == 1) tput += listeners;
    }
    audit.groupput = tput / P;
    return audit;
}

}  // namespace econcast
