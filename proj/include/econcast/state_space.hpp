#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace econcast {

/// Per-node radio state. Canonical order: Sleep < Listen < Transmit.
enum class NodeState : std::uint8_t { Sleep = 0, Listen = 1, Transmit = 2 };

enum class ThroughputMode { Groupput, Anyput };

/// One sleep/listen/transmit assignment per node.
using NetworkState = std::vector<NodeState>;

char to_char(NodeState s);
std::string to_string(const NetworkState& w);

struct ListenerStats {
    int listeners = 0;          // c_w
    bool any_listener = false;  // gamma_w
    bool one_transmitter = false;  // nu_w
};

ListenerStats listener_stats(const NetworkState& w);

/// Throughput of a single network state: nu*c (groupput) or nu*gamma (anyput).
double state_throughput(const NetworkState& w, ThroughputMode mode);

/// Enumeration is exponential in the node count; larger networks are rejected.
inline constexpr int kMaxEnumerationNodes = 20;

/// Number of collision-free states for n nodes: (n+2) * 2^(n-1).
std::uint64_t collision_free_state_count(int n);

/// All collision-free states (at most one transmitter), in lexicographic
/// order over node states with Sleep < Listen < Transmit.
std::vector<NetworkState> enumerate_states(int n);

/// Canonical enumeration with index<->state bijections, so distribution
/// vectors can be addressed by index consistently across modules.
class StateSpace {
  public:
    explicit StateSpace(int n);

    int node_count() const { return node_count_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<NetworkState>& states() const { return states_; }
    const NetworkState& state(std::size_t index) const { return states_.at(index); }

    /// Index of a state in canonical order; throws if not collision-free.
    std::size_t index_of(const NetworkState& w) const;

    /// 2-bits-per-node packed code used as the hash key.
    static std::uint64_t pack(const NetworkState& w);

  private:
    int node_count_;
    std::vector<NetworkState> states_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace econcast
