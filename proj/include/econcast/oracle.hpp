#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "econcast/state_space.hpp"

namespace econcast {

/// Per-node power budget and listen/transmit consumption levels, in watts.
struct NodePowerProfile {
    double rho = 0.0;            // power budget
    double listen_cost = 0.0;    // L_i
    double transmit_cost = 0.0;  // X_i

    void validate() const;
};

struct Topology {
    enum class Kind { Clique, Graph };

    Kind kind = Kind::Clique;
    int node_count = 0;
    /// Row-major symmetric adjacency with empty diagonal; empty for cliques.
    std::vector<bool> adjacency;

    static Topology clique(int n);
    static Topology graph(int n, std::vector<bool> adjacency);
    /// rows x cols grid, 4-neighborhood, node index = row * cols + col.
    static Topology grid(int rows, int cols);

    bool is_clique() const { return kind == Kind::Clique; }
    bool adjacent(int i, int j) const;
    std::vector<int> neighbors(int i) const;
    void validate() const;
};

struct NetworkConfig {
    std::vector<NodePowerProfile> nodes;
    Topology topology;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool homogeneous() const;
    void validate() const;

    static NetworkConfig homogeneous_clique(int n, const NodePowerProfile& profile);
};

/// Listen/transmit time fractions and the throughput they achieve.
struct OracleSolution {
    std::vector<double> alpha;  // listen fraction per node
    std::vector<double> beta;   // transmit fraction per node
    /// Anyput only: chi[i*n+j] = fraction of time node j receives node i.
    std::optional<std::vector<double>> pair_fractions;
    double throughput = 0.0;
    ThroughputMode mode = ThroughputMode::Groupput;
    double duality_gap = 0.0;
};

/// Oracle groupput LP on a clique: max sum(alpha) subject to the power
/// budget, awake-time, single-transmitter and listen-coverage constraints.
/// Among alternate optima, returns the vertex that also maximizes total
/// awake time (deterministic two-phase solve).
OracleSolution solve_groupput_lp(const NetworkConfig& config);

/// Oracle anyput LP on a clique, with per-pair reception fractions.
OracleSolution solve_anyput_lp(const NetworkConfig& config);

/// Closed forms for homogeneous, sufficiently energy-constrained cliques.
/// Requires n >= 2 and closed-form alpha* + beta* <= 1 (the regime where the
/// power constraint dominates the awake-time constraint).
OracleSolution homogeneous_closed_form(int n, const NodePowerProfile& profile,
                                       ThroughputMode mode);

struct NoncliqueBounds {
    OracleSolution lower;
    OracleSolution upper;
};

/// Groupput bound pair for graph topologies: both replace listen coverage by
/// the neighborhood version; the upper bound drops the global
/// single-transmitter constraint (overlapping transmissions possible).
NoncliqueBounds nonclique_bounds(const NetworkConfig& config);

struct PeriodicSchedule {
    std::int64_t period = 0;   // P, slots per period
    double slot_length = 0.0;  // theta, seconds
    /// assignments[slot][node]
    std::vector<std::vector<NodeState>> assignments;

    std::int64_t transmit_slots(int node) const;
    std::int64_t listen_slots(int node) const;
};

/// Feasible periodic schedule realizing a (rational) clique groupput
/// solution: P is the least common denominator of the rationalized
/// fractions, transmit slots are dealt round-robin in node order, listen
/// slots are picked greedily from other nodes' transmit slots.
PeriodicSchedule build_periodic_schedule(const OracleSolution& solution, double slot_length,
                                         std::int64_t max_denominator = 10000);

struct ScheduleAudit {
    bool ok = true;
    double groupput = 0.0;  // per-period average of c_w over slots
    std::vector<std::string> violations;
};

/// Checks every PeriodicSchedule invariant against a solution and the power
/// budgets (per-period energy within rho_i * P * theta).
ScheduleAudit audit_schedule(const PeriodicSchedule& schedule, const NetworkConfig& config,
                             const OracleSolution& solution);

/// Best rational approximation p/q to v with q <= max_denominator
/// (continued-fraction convergents and semiconvergents).
std::pair<std::int64_t, std::int64_t> rationalize(double v, std::int64_t max_denominator);

}  // namespace econcast
