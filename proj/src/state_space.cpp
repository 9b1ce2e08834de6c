#include "econcast/state_space.hpp"

namespace econcast {

char to_char(NodeState s) {
    switch (s) {
        case NodeState::Sleep: return 's';
        case NodeState::Listen: return 'l';
        case NodeState::Transmit: return 'x';
    }
    return '?';
}

std::string to_string(const NetworkState& w) {
    std::string out;
    out.reserve(w.size());
    for (NodeState s : w) out.push_back(to_char(s));
    return out;
}

ListenerStats listener_stats(const NetworkState& w) {
    ListenerStats st;
    int transmitters = 0;
    for (NodeState s : w) {
        if (s == NodeState::Listen) ++st.listeners;
        if (s == NodeState::Transmit) ++transmitters;
    }
    st.any_listener = st.listeners >= 1;
    st.one_transmitter = transmitters == 1;
    return st;
}

double state_throughput(const NetworkState& w, ThroughputMode mode) {
    const ListenerStats st = listener_stats(w);
    if (!st.one_transmitter) return 0.0;
    return mode == ThroughputMode::Groupput ? static_cast<double>(st.listeners)
                                            : (st.any_listener ? 1.0 : 0.0);
}

std::uint64_t collision_free_state_count(int n) {
    return (static_cast<std::uint64_t>(n) + 2) << (n - 1);
}

namespace {

void check_node_count(int n) {
    if (n < 1 || n > kMaxEnumerationNodes) {
        throw std::invalid_argument(
            "state enumeration supports 1.." + std::to_string(kMaxEnumerationNodes) +
            " nodes, got " + std::to_string(n));
    }
}

}  // namespace

std::vector<NetworkState> enumerate_states(int n) {
    check_node_count(n);
    std::vector<NetworkState> states;
    states.reserve(collision_free_state_count(n));
    NetworkState current(static_cast<std::size_t>(n), NodeState::Sleep);
    // Depth-first with Sleep < Listen < Transmit at each position yields
    // lexicographic order; at most one Transmit along any path.
    auto recurse = [&](auto&& self, int pos, bool have_transmitter) -> void {
        if (pos == n) {
            states.push_back(current);
            return;
        }
        current[pos] = NodeState::Sleep;
        self(self, pos + 1, have_transmitter);
        current[pos] = NodeState::Listen;
        self(self, pos + 1, have_transmitter);
        if (!have_transmitter) {
            current[pos] = NodeState::Transmit;
            self(self, pos + 1, true);
        }
        current[pos] = NodeState::Sleep;
    };
    recurse(recurse, 0, false);
    return states;
}

StateSpace::StateSpace(int n) : node_count_(n), states_(enumerate_states(n)) {
    index_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(pack(states_[i]), i);
}

std::size_t StateSpace::index_of(const NetworkState& w) const {
    if (w.size() != static_cast<std::size_t>(node_count_)) {
        throw std::invalid_argument("state has " + std::to_string(w.size()) +
                                    " nodes, space has " + std::to_string(node_count_));
    }
    auto it = index_.find(pack(w));
    if (it == index_.end()) {
        throw std::invalid_argument("state " + to_string(w) + " is not collision-free");
    }
    return it->second;
}

std::uint64_t StateSpace::pack(const NetworkState& w) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        code |= static_cast<std::uint64_t>(w[i]) << (2 * i);
    }
    return code;
}

}  // namespace econcast
