#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "econcast/analytics.hpp"
#include "econcast/config_io.hpp"
#include "econcast/gibbs.hpp"
#include "econcast/oracle.hpp"
#include "econcast/protocol.hpp"
#include "econcast/simulator.hpp"

namespace py = pybind11;
using namespace econcast;

namespace {

std::vector<std::string> state_strings(int n) {
    std::vector<std::string> out;
    for (const auto& w : enumerate_states(n)) out.push_back(to_string(w));
    return out;
}

NetworkState state_from_string(const std::string& s) {
    NetworkState w;
    for (char c : s) {
        switch (c) {
            case 's': w.push_back(NodeState::Sleep); break;
            case 'l': w.push_back(NodeState::Listen); break;
            case 'x': w.push_back(NodeState::Transmit); break;
            default: throw std::invalid_argument("state letters are s, l, x");
        }
    }
    return w;
}

}  // namespace

PYBIND11_MODULE(_econcast, m) {
    m.doc() = "Energy-constrained broadcast scheduling: oracle LPs, Gibbs solutions "
              "and protocol simulation";

    py::enum_<ThroughputMode>(m, "ThroughputMode")
        .value("Groupput", ThroughputMode::Groupput)
        .value("Anyput", ThroughputMode::Anyput);
    py::enum_<ProtocolVariant>(m, "ProtocolVariant")
        .value("Capture", ProtocolVariant::Capture)
        .value("NonCapture", ProtocolVariant::NonCapture);
    py::enum_<EstimatorKind>(m, "EstimatorKind")
        .value("Perfect", EstimatorKind::Perfect)
        .value("PingBased", EstimatorKind::PingBased);

    py::class_<NodePowerProfile>(m, "NodePowerProfile")
        .def(py::init([](double rho, double listen_cost, double transmit_cost) {
                 NodePowerProfile p{rho, listen_cost, transmit_cost};
                 p.validate();
                 return p;
             }),
             py::arg("rho"), py::arg("listen_cost"), py::arg("transmit_cost"))
        .def_readonly("rho", &NodePowerProfile::rho)
        .def_readonly("listen_cost", &NodePowerProfile::listen_cost)
        .def_readonly("transmit_cost", &NodePowerProfile::transmit_cost);

    py::class_<Topology>(m, "Topology")
        .def_static("clique", &Topology::clique, py::arg("n"))
        .def_static("grid", &Topology::grid, py::arg("rows"), py::arg("cols"))
        .def_static("graph",
                    [](int n, const std::vector<std::vector<int>>& adj) {
                        std::vector<bool> flat;
                        for (const auto& row : adj) {
                            for (int v : row) flat.push_back(v != 0);
                        }
                        return Topology::graph(n, std::move(flat));
                    },
                    py::arg("n"), py::arg("adjacency"))
        .def_property_readonly("node_count", [](const Topology& t) { return t.node_count; })
        .def("is_clique", &Topology::is_clique)
        .def("neighbors", &Topology::neighbors, py::arg("node"));

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init([](std::vector<NodePowerProfile> nodes, std::optional<Topology> topo) {
                 NetworkConfig cfg;
                 cfg.nodes = std::move(nodes);
                 cfg.topology = topo ? *topo : Topology::clique(cfg.node_count());
                 cfg.validate();
                 return cfg;
             }),
             py::arg("nodes"), py::arg("topology") = std::nullopt)
        .def_static("homogeneous_clique", &NetworkConfig::homogeneous_clique, py::arg("n"),
                    py::arg("profile"))
        .def_static("from_json",
                    [](const std::string& text) {
                        return io::parse_network_config(nlohmann::json::parse(text));
                    })
        .def_property_readonly("nodes", [](const NetworkConfig& c) { return c.nodes; })
        .def_property_readonly("topology", [](const NetworkConfig& c) { return c.topology; })
        .def("node_count", &NetworkConfig::node_count)
        .def("homogeneous", &NetworkConfig::homogeneous)
        .def("to_json", [](const NetworkConfig& c) { return io::to_json(c).dump(); });

    py::class_<OracleSolution>(m, "OracleSolution")
        .def_readonly("alpha", &OracleSolution::alpha)
        .def_readonly("beta", &OracleSolution::beta)
        .def_readonly("pair_fractions", &OracleSolution::pair_fractions)
        .def_readonly("throughput", &OracleSolution::throughput)
        .def_readonly("mode", &OracleSolution::mode)
        .def_readonly("duality_gap", &OracleSolution::duality_gap);

    py::class_<NoncliqueBounds>(m, "NoncliqueBounds")
        .def_readonly("lower", &NoncliqueBounds::lower)
        .def_readonly("upper", &NoncliqueBounds::upper);

    py::class_<Multipliers>(m, "Multipliers")
        .def(py::init([](std::vector<double> eta) { return Multipliers{std::move(eta)}; }),
             py::arg("eta"))
        .def_static("zeros", &Multipliers::zeros, py::arg("n"))
        .def_readonly("eta", &Multipliers::eta);

    py::class_<StateDistribution>(m, "StateDistribution")
        .def_readonly("node_count", &StateDistribution::node_count)
        .def_readonly("log_weights", &StateDistribution::log_weights)
        .def_readonly("probabilities", &StateDistribution::probabilities)
        .def_readonly("log_partition", &StateDistribution::log_partition);

    py::class_<StepRule>(m, "StepRule")
        .def_static("adaptive", &StepRule::adaptive)
        .def_static("harmonic", &StepRule::harmonic, py::arg("scale") = 1.0)
        .def_static("log_harmonic", &StepRule::log_harmonic, py::arg("scale") = 1.0)
        .def_static("constant", &StepRule::constant, py::arg("scale"));

    py::class_<GibbsResult>(m, "GibbsResult")
        .def_readonly("multipliers", &GibbsResult::multipliers)
        .def_readonly("distribution", &GibbsResult::distribution)
        .def_readonly("throughput", &GibbsResult::throughput)
        .def_readonly("entropy", &GibbsResult::entropy)
        .def_readonly("objective", &GibbsResult::objective)
        .def_readonly("sigma", &GibbsResult::sigma)
        .def_readonly("converged", &GibbsResult::converged)
        .def_readonly("iterations", &GibbsResult::iterations)
        .def("to_json", [](const GibbsResult& r) { return io::to_json(r).dump(); });

    py::class_<RateSet>(m, "RateSet")
        .def_readonly("sleep_to_listen", &RateSet::sleep_to_listen)
        .def_readonly("listen_to_sleep", &RateSet::listen_to_sleep)
        .def_readonly("listen_to_transmit", &RateSet::listen_to_transmit)
        .def_readonly("transmit_to_listen", &RateSet::transmit_to_listen);

    py::class_<ListenerEstimate>(m, "ListenerEstimate")
        .def_static("from_count", &ListenerEstimate::from_count, py::arg("count"))
        .def_readonly("count_estimate", &ListenerEstimate::count_estimate)
        .def_readonly("any_estimate", &ListenerEstimate::any_estimate);

    py::class_<NodeRuntime>(m, "NodeRuntime")
        .def(py::init([](double multiplier, NodePowerProfile params) {
                 NodeRuntime rt;
                 rt.multiplier = multiplier;
                 rt.params = params;
                 return rt;
             }),
             py::arg("multiplier"), py::arg("params"))
        .def_readwrite("multiplier", &NodeRuntime::multiplier)
        .def_readwrite("battery", &NodeRuntime::battery)
        .def_readwrite("battery_at_interval_start", &NodeRuntime::battery_at_interval_start)
        .def_readonly("interval_index", &NodeRuntime::interval_index);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_static("from_json",
                    [](const std::string& text) {
                        return io::parse_sim_config(nlohmann::json::parse(text));
                    })
        .def_readwrite("network", &SimConfig::network)
        .def_readwrite("sigma", &SimConfig::sigma)
        .def_readwrite("variant", &SimConfig::variant)
        .def_readwrite("mode", &SimConfig::mode)
        .def_readwrite("duration", &SimConfig::duration)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("packet_length", &SimConfig::packet_length)
        .def_readwrite("delta", &SimConfig::delta)
        .def_readwrite("tau", &SimConfig::tau)
        .def_readwrite("estimator", &SimConfig::estimator)
        .def_readwrite("ping_interval", &SimConfig::ping_interval)
        .def_readwrite("ping_length", &SimConfig::ping_length)
        .def_readwrite("freeze_multipliers", &SimConfig::freeze_multipliers)
        .def_readwrite("initial_multipliers", &SimConfig::initial_multipliers)
        .def_readwrite("warmup", &SimConfig::warmup)
        .def_readwrite("collect_occupancy", &SimConfig::collect_occupancy)
        .def_readwrite("max_events", &SimConfig::max_events)
        .def("to_json", [](const SimConfig& c) { return io::to_json(c).dump(); });

    py::class_<SimMetrics>(m, "SimMetrics")
        .def_readonly("groupput", &SimMetrics::groupput)
        .def_readonly("anyput", &SimMetrics::anyput)
        .def_readonly("sim_time", &SimMetrics::sim_time)
        .def_readonly("events", &SimMetrics::events)
        .def_readonly("burst_lengths", &SimMetrics::burst_lengths)
        .def_readonly("burst_count", &SimMetrics::burst_count)
        .def_readonly("burst_mean", &SimMetrics::burst_mean)
        .def_readonly("burst_run_count", &SimMetrics::burst_run_count)
        .def_readonly("burst_run_mean", &SimMetrics::burst_run_mean)
        .def_readonly("latencies", &SimMetrics::latencies)
        .def_readonly("latency_count", &SimMetrics::latency_count)
        .def_readonly("latency_mean", &SimMetrics::latency_mean)
        .def_readonly("per_node_energy_rate", &SimMetrics::per_node_energy_rate)
        .def_readonly("listen_fraction", &SimMetrics::listen_fraction)
        .def_readonly("transmit_fraction", &SimMetrics::transmit_fraction)
        .def_readonly("final_multipliers", &SimMetrics::final_multipliers)
        .def_readonly("final_battery", &SimMetrics::final_battery)
        .def_readonly("occupancy", &SimMetrics::occupancy)
        .def_readonly("collided_time", &SimMetrics::collided_time)
        .def("to_json", [](const SimMetrics& metrics) { return io::to_json(metrics).dump(); });

    py::class_<DetailedBalanceReport>(m, "DetailedBalanceReport")
        .def_readonly("max_relative_violation", &DetailedBalanceReport::max_relative_violation)
        .def_readonly("pairs_checked", &DetailedBalanceReport::pairs_checked)
        .def_readonly("worst_pair", &DetailedBalanceReport::worst_pair);

    py::class_<LatencyReport>(m, "LatencyReport")
        .def_readonly("mean", &LatencyReport::mean)
        .def_readonly("p99", &LatencyReport::p99)
        .def_readonly("cdf", &LatencyReport::cdf);

    py::class_<PeriodicSchedule>(m, "PeriodicSchedule")
        .def_readonly("period", &PeriodicSchedule::period)
        .def_readonly("slot_length", &PeriodicSchedule::slot_length)
        .def("transmit_slots", &PeriodicSchedule::transmit_slots, py::arg("node"))
        .def("listen_slots", &PeriodicSchedule::listen_slots, py::arg("node"))
        .def("slot_states", [](const PeriodicSchedule& s) {
            std::vector<std::string> rows;
            for (const auto& slot : s.assignments) {
                std::string row;
                for (NodeState st : slot) row.push_back(to_char(st));
                rows.push_back(row);
            }
            return rows;
        });

    // state space
    m.def("enumerate_states", &state_strings, py::arg("n"),
          "All collision-free states in canonical order, as s/l/x strings");
    m.def("state_throughput",
          [](const std::string& w, ThroughputMode mode) {
              return state_throughput(state_from_string(w), mode);
          },
          py::arg("state"), py::arg("mode"));
    m.def("listener_stats", [](const std::string& w) {
        const auto st = listener_stats(state_from_string(w));
        return py::make_tuple(st.listeners, st.any_listener, st.one_transmitter);
    });

    // oracle
    m.def("solve_groupput_lp", &solve_groupput_lp, py::arg("config"));
    m.def("solve_anyput_lp", &solve_anyput_lp, py::arg("config"));
    m.def("homogeneous_closed_form", &homogeneous_closed_form, py::arg("n"), py::arg("profile"),
          py::arg("mode"));
    m.def("nonclique_bounds", &nonclique_bounds, py::arg("config"));
    m.def("build_periodic_schedule", &build_periodic_schedule, py::arg("solution"),
          py::arg("slot_length"), py::arg("max_denominator") = 10000);

    // gibbs
    m.def("steady_state_distribution", &steady_state_distribution, py::arg("config"),
          py::arg("eta"), py::arg("sigma"), py::arg("mode"));
    m.def("marginal_fractions",
          [](const StateDistribution& dist, const NetworkConfig& cfg) {
              const auto m2 = marginal_fractions(dist, cfg);
              return py::make_tuple(m2.alpha, m2.beta);
          },
          py::arg("dist"), py::arg("config"));
    m.def("p4_objective", &p4_objective, py::arg("dist"), py::arg("sigma"), py::arg("mode"),
          py::arg("config"));
    m.def("dual_gradient", &dual_gradient, py::arg("config"), py::arg("eta"), py::arg("sigma"),
          py::arg("mode"));
    m.def("gradient_descent", &gradient_descent, py::arg("config"), py::arg("sigma"),
          py::arg("mode"), py::arg("step_rule") = StepRule::adaptive(),
          py::arg("max_iters") = 100000, py::arg("stop_tol") = 1e-7,
          py::call_guard<py::gil_scoped_release>());

    // protocol
    m.def("transition_rates", &transition_rates, py::arg("runtime"), py::arg("sigma"),
          py::arg("carrier_clear"), py::arg("estimate"), py::arg("variant"), py::arg("mode"));
    m.def("update_multiplier", &update_multiplier, py::arg("runtime"), py::arg("delta_k"),
          py::arg("tau_k"), py::arg("battery_end"));
    m.def("transmit_continuation_probability", &transmit_continuation_probability,
          py::arg("estimate"), py::arg("sigma"), py::arg("mode"));

    // simulator + analytics
    m.def("run_simulation", &run_simulation, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("verify_detailed_balance", &verify_detailed_balance, py::arg("config"), py::arg("eta"),
          py::arg("sigma"), py::arg("variant"), py::arg("mode"));
    m.def("analytic_burst_length", &analytic_burst_length, py::arg("dist"), py::arg("sigma"),
          py::arg("mode"), py::arg("config"));
    m.def("latency_report", &latency_report, py::arg("metrics"));
    m.def("sample_heterogeneous_network",
          [](double h, int n, std::uint64_t seed) {
              Rng rng(seed);
              return sample_heterogeneous_network(h, n, rng);
          },
          py::arg("h"), py::arg("n"), py::arg("seed"));
}
