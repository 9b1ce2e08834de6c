#include "econcast/config_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace econcast::io {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out = "configuration invalid:";
    for (const auto& p : parts) out += "\n  - " + p;
    return out;
}

struct Diagnostics {
    std::vector<std::string> errors;

    void add(const std::string& where, const std::string& what) {
        errors.push_back(where + ": " + what);
    }
    void raise_if_any() const {
        if (!errors.empty()) throw ConfigError(errors);
    }
};

double parse_suffixed(const json& value, const char* kind,
                      const std::vector<std::pair<std::string, double>>& suffixes) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) {
        throw std::invalid_argument(std::string("expected number or string for ") + kind);
    }
    const std::string s = value.get<std::string>();
    for (const auto& [suffix, factor] : suffixes) {
        if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                  suffix) == 0) {
            const std::string num = s.substr(0, s.size() - suffix.size());
            std::size_t used = 0;
            const double v = std::stod(num, &used);
            while (used < num.size() && std::isspace(static_cast<unsigned char>(num[used]))) {
                ++used;
            }
            if (used != num.size()) {
                throw std::invalid_argument("bad numeric part in '" + s + "'");
            }
            return v * factor;
        }
    }
    throw std::invalid_argument("unknown " + std::string(kind) + " unit in '" + s + "'");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

double parse_power(const json& value) {
    // Longest suffixes first so "mW" is not read as "W".
    static const std::vector<std::pair<std::string, double>> units = {
        {"pW", 1e-12}, {"nW", 1e-9}, {"uW", 1e-6}, {"µW", 1e-6},
        {"mW", 1e-3},  {"kW", 1e3},  {"W", 1.0},
    };
    return parse_suffixed(value, "power", units);
}

double parse_duration(const json& value) {
    static const std::vector<std::pair<std::string, double>> units = {
        {"ns", 1e-9}, {"us", 1e-6}, {"µs", 1e-6}, {"ms", 1e-3}, {"s", 1.0},
    };
    return parse_suffixed(value, "duration", units);
}

namespace {

double power_field(const json& node, const char* key, const std::string& where,
                   Diagnostics& diag, double fallback = -1.0) {
    if (!node.contains(key)) {
        if (fallback >= 0) return fallback;
        diag.add(where + "/" + key, "missing required field");
        return 0.0;
    }
    try {
        const double v = parse_power(node.at(key));
        if (!(v > 0)) diag.add(where + "/" + key, "must be > 0");
        return v;
    } catch (const std::exception& e) {
        diag.add(where + "/" + key, e.what());
        return 0.0;
    }
}

Topology parse_topology(const json& j, std::size_t node_count, Diagnostics& diag) {
    if (!j.contains("topology") || (j.at("topology").is_string() &&
                                    j.at("topology").get<std::string>() == "clique")) {
        return Topology::clique(static_cast<int>(node_count));
    }
    const json& t = j.at("topology");
    if (t.is_object() && t.contains("grid")) {
        const auto& g = t.at("grid");
        if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() ||
            !g[1].is_number_integer()) {
            diag.add("/topology/grid", "expected [rows, cols]");
            return Topology::clique(static_cast<int>(node_count));
        }
        return Topology::grid(g[0].get<int>(), g[1].get<int>());
    }
    if (t.is_object() && t.contains("adjacency")) {
        const auto& a = t.at("adjacency");
        const auto n = a.size();
        std::vector<bool> adj(n * n, false);
        bool shape_ok = a.is_array();
        for (std::size_t i = 0; shape_ok && i < n; ++i) {
            if (!a[i].is_array() || a[i].size() != n) {
                shape_ok = false;
                break;
            }
            for (std::size_t k = 0; k < n; ++k) {
                adj[i * n + k] = a[i][k].get<int>() != 0;
            }
        }
        if (!shape_ok) {
            diag.add("/topology/adjacency", "expected a square 0/1 matrix");
            return Topology::clique(static_cast<int>(node_count));
        }
        try {
            return Topology::graph(static_cast<int>(n), std::move(adj));
        } catch (const std::exception& e) {
            diag.add("/topology/adjacency", e.what());
            return Topology::clique(static_cast<int>(node_count));
        }
    }
    diag.add("/topology", "expected \"clique\", {\"grid\":[r,c]} or {\"adjacency\":[[...]]}");
    return Topology::clique(static_cast<int>(node_count));
}

}  // namespace

NetworkConfig parse_network_config(const json& j) {
    Diagnostics diag;
    NetworkConfig cfg;
    if (!j.is_object()) {
        diag.add("/", "network config must be a JSON object");
        diag.raise_if_any();
    }
    if (j.contains("nodes") && j.at("nodes").is_array()) {
        std::size_t idx = 0;
        for (const auto& node : j.at("nodes")) {
            const std::string where = "/nodes/" + std::to_string(idx++);
            NodePowerProfile p;
            p.rho = power_field(node, "rho", where, diag);
            p.listen_cost = power_field(node, "listen_cost", where, diag);
            p.transmit_cost = power_field(node, "transmit_cost", where, diag);
            cfg.nodes.push_back(p);
        }
        if (cfg.nodes.empty()) diag.add("/nodes", "need at least one node");
    } else if (j.contains("homogeneous")) {
        const auto& h = j.at("homogeneous");
        const int count = h.contains("count") ? h.at("count").get<int>() : 0;
        if (count < 1) diag.add("/homogeneous/count", "need at least one node");
        NodePowerProfile p;
        p.rho = power_field(h, "rho", "/homogeneous", diag);
        p.listen_cost = power_field(h, "listen_cost", "/homogeneous", diag);
        p.transmit_cost = power_field(h, "transmit_cost", "/homogeneous", diag);
        cfg.nodes.assign(static_cast<std::size_t>(std::max(count, 1)), p);
    } else {
        diag.add("/nodes", "missing required field (or use \"homogeneous\")");
    }
    cfg.topology = parse_topology(j, cfg.nodes.size(), diag);
    if (cfg.topology.node_count != static_cast<int>(cfg.nodes.size())) {
        diag.add("/topology", "node count " + std::to_string(cfg.topology.node_count) +
                                  " does not match nodes array of " +
                                  std::to_string(cfg.nodes.size()));
    }
    diag.raise_if_any();
    cfg.validate();
    return cfg;
}

SimConfig parse_sim_config(const json& j) {
    Diagnostics diag;
    if (!j.is_object()) {
        diag.add("/", "sim config must be a JSON object");
        diag.raise_if_any();
    }
    SimConfig cfg;
    if (!j.contains("network")) {
        diag.add("/network", "missing required field");
        diag.raise_if_any();
    }
    cfg.network = parse_network_config(j.at("network"));
    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        try {
            const double v = j.at(key).get<double>();
            return v;
        } catch (const std::exception& e) {
            diag.add(std::string("/") + key, e.what());
            return fallback;
        }
    };
    auto dur = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        try {
            return parse_duration(j.at(key));
        } catch (const std::exception& e) {
            diag.add(std::string("/") + key, e.what());
            return fallback;
        }
    };
    cfg.sigma = num("sigma", cfg.sigma);
    cfg.duration = dur("duration", cfg.duration);
    cfg.warmup = dur("warmup", cfg.warmup);
    cfg.packet_length = dur("packet_length", cfg.packet_length);
    cfg.delta = num("delta", cfg.delta);
    cfg.tau = dur("tau", cfg.tau);
    cfg.ping_interval = dur("ping_interval", cfg.ping_interval);
    cfg.ping_length = dur("ping_length", cfg.ping_length);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_events")) cfg.max_events = j.at("max_events").get<std::uint64_t>();
    if (j.contains("collect_occupancy")) {
        cfg.collect_occupancy = j.at("collect_occupancy").get<bool>();
    }
    if (j.contains("log_harmonic_schedule")) {
        cfg.log_harmonic_schedule = j.at("log_harmonic_schedule").get<bool>();
    }
    if (j.contains("ping_interval_counts_as_listen")) {
        cfg.ping_interval_counts_as_listen = j.at("ping_interval_counts_as_listen").get<bool>();
    }
    try {
        if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
        if (j.contains("estimator")) {
            cfg.estimator = parse_estimator(j.at("estimator").get<std::string>());
        }
    } catch (const std::exception& e) {
        diag.add("/mode", e.what());
    }
    if (j.contains("freeze_multipliers")) {
        Multipliers m;
        m.eta = j.at("freeze_multipliers").get<std::vector<double>>();
        cfg.freeze_multipliers = std::move(m);
    }
    if (j.contains("initial_multipliers")) {
        Multipliers m;
        m.eta = j.at("initial_multipliers").get<std::vector<double>>();
        cfg.initial_multipliers = std::move(m);
    }
    if (j.contains("battery_floor")) cfg.battery_floor = j.at("battery_floor").get<double>();
    if (j.contains("battery_ceiling")) cfg.battery_ceiling = j.at("battery_ceiling").get<double>();
    diag.raise_if_any();
    cfg.validate();
    return cfg;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path + ": cannot open file"});
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
}

NetworkConfig load_network_config(const std::string& path) {
    return parse_network_config(load_json(path));
}

SimConfig load_sim_config(const std::string& path) { return parse_sim_config(load_json(path)); }

json to_json(const NetworkConfig& config) {
    json nodes = json::array();
    for (const auto& p : config.nodes) {
        nodes.push_back({{"rho", p.rho},
                         {"listen_cost", p.listen_cost},
                         {"transmit_cost", p.transmit_cost}});
    }
    json topology;
    if (config.topology.is_clique()) {
        topology = "clique";
    } else {
        const int n = config.topology.node_count;
        json adj = json::array();
        for (int i = 0; i < n; ++i) {
            json row = json::array();
            for (int j = 0; j < n; ++j) row.push_back(config.topology.adjacent(i, j) ? 1 : 0);
            adj.push_back(row);
        }
        topology = {{"adjacency", adj}};
    }
    return {{"nodes", nodes}, {"topology", topology}};
}

json to_json(const SimConfig& config) {
    json j{{"network", to_json(config.network)},
           {"sigma", config.sigma},
           {"variant", to_string(config.variant)},
           {"mode", to_string(config.mode)},
           {"duration", config.duration},
           {"warmup", config.warmup},
           {"seed", config.seed},
           {"packet_length", config.packet_length},
           {"delta", config.delta},
           {"tau", config.tau},
           {"log_harmonic_schedule", config.log_harmonic_schedule},
           {"estimator", to_string(config.estimator)},
           {"ping_interval", config.ping_interval},
           {"ping_length", config.ping_length},
           {"ping_interval_counts_as_listen", config.ping_interval_counts_as_listen},
           {"collect_occupancy", config.collect_occupancy},
           {"max_events", config.max_events}};
    if (config.freeze_multipliers) j["freeze_multipliers"] = config.freeze_multipliers->eta;
    if (config.initial_multipliers) j["initial_multipliers"] = config.initial_multipliers->eta;
    if (config.battery_floor) j["battery_floor"] = *config.battery_floor;
    if (config.battery_ceiling) j["battery_ceiling"] = *config.battery_ceiling;
    return j;
}

json to_json(const OracleSolution& solution) {
    json j{{"mode", to_string(solution.mode)},
           {"throughput", solution.throughput},
           {"alpha", solution.alpha},
           {"beta", solution.beta},
           {"duality_gap", solution.duality_gap}};
    if (solution.pair_fractions) j["pair_fractions"] = *solution.pair_fractions;
    return j;
}

json to_json(const NoncliqueBounds& bounds) {
    return {{"lower", to_json(bounds.lower)}, {"upper", to_json(bounds.upper)}};
}

json to_json(const GibbsResult& result, bool include_distribution) {
    json trace = json::array();
    for (const auto& it : result.trace) {
        trace.push_back({{"iteration", it.iteration},
                         {"eta", it.eta},
                         {"throughput", it.throughput},
                         {"power_slack", it.power_slack}});
    }
    json j{{"mode", to_string(result.mode)},
           {"sigma", result.sigma},
           {"eta", result.multipliers.eta},
           {"throughput", result.throughput},
           {"entropy", result.entropy},
           {"objective", result.objective},
           {"converged", result.converged},
           {"iterations", result.iterations},
           {"trace", trace}};
    if (include_distribution) {
        j["distribution"] = {{"probabilities", result.distribution.probabilities},
                             {"log_partition", result.distribution.log_partition}};
    }
    return j;
}

json to_json(const SimMetrics& metrics) {
    json j{{"groupput", metrics.groupput},
           {"anyput", metrics.anyput},
           {"sim_time", metrics.sim_time},
           {"events", metrics.events},
           {"burst_count", metrics.burst_count},
           {"burst_mean", metrics.burst_mean},
           {"burst_run_count", metrics.burst_run_count},
           {"burst_run_mean", metrics.burst_run_mean},
           {"latency_count", metrics.latency_count},
           {"latency_mean", metrics.latency_mean},
           {"per_node_energy_rate", metrics.per_node_energy_rate},
           {"listen_fraction", metrics.listen_fraction},
           {"transmit_fraction", metrics.transmit_fraction},
           {"final_multipliers", metrics.final_multipliers},
           {"collided_time", metrics.collided_time}};
    if (!metrics.occupancy.empty()) j["occupancy"] = metrics.occupancy;
    if (!metrics.latencies.empty()) {
        try {
            j["latency_report"] = to_json(latency_report(metrics));
        } catch (const std::exception&) {
        }
    }
    j["multiplier_trace_times"] = metrics.multiplier_trace_times;
    j["multiplier_trace"] = metrics.multiplier_trace;
    return j;
}

json to_json(const PeriodicSchedule& schedule) {
    json slots = json::array();
    for (const auto& slot : schedule.assignments) {
        std::string row;
        row.reserve(slot.size());
        for (NodeState s : slot) row.push_back(to_char(s));
        slots.push_back(row);
    }
    return {{"period", schedule.period},
            {"slot_length", schedule.slot_length},
            {"assignments", slots}};
}

json to_json(const DetailedBalanceReport& report) {
    return {{"max_relative_violation", report.max_relative_violation},
            {"pairs_checked", report.pairs_checked},
            {"worst_pair", report.worst_pair}};
}

json to_json(const LatencyReport& report) {
    // The CDF is down-sampled to keep artifacts reviewable.
    json cdf = json::array();
    const std::size_t stride = std::max<std::size_t>(1, report.cdf.size() / 512);
    for (std::size_t k = 0; k < report.cdf.size(); k += stride) {
        cdf.push_back({report.cdf[k].first, report.cdf[k].second});
    }
    if (!report.cdf.empty() && (report.cdf.size() - 1) % stride != 0) {
        cdf.push_back({report.cdf.back().first, report.cdf.back().second});
    }
    return {{"mean", report.mean}, {"p99", report.p99}, {"cdf", cdf}};
}

json to_json(const BurstinessReport& report) {
    return {{"mode", to_string(report.mode)},
            {"sigma", report.sigma},
            {"analytic_mean", report.analytic_mean},
            {"empirical_mean", report.empirical_mean},
            {"relative_gap", report.relative_gap}};
}

ThroughputMode parse_mode(const std::string& word) {
    if (word == "groupput") return ThroughputMode::Groupput;
    if (word == "anyput") return ThroughputMode::Anyput;
    throw std::invalid_argument("mode must be groupput|anyput, got '" + word + "'");
}

ProtocolVariant parse_variant(const std::string& word) {
    if (word == "capture") return ProtocolVariant::Capture;
    if (word == "noncapture") return ProtocolVariant::NonCapture;
    throw std::invalid_argument("variant must be capture|noncapture, got '" + word + "'");
}

EstimatorKind parse_estimator(const std::string& word) {
    if (word == "perfect") return EstimatorKind::Perfect;
    if (word == "ping") return EstimatorKind::PingBased;
    throw std::invalid_argument("estimator must be perfect|ping, got '" + word + "'");
}

std::string to_string(ThroughputMode mode) {
    return mode == ThroughputMode::Groupput ? "groupput" : "anyput";
}
std::string to_string(ProtocolVariant variant) {
    return variant == ProtocolVariant::Capture ? "capture" : "noncapture";
}
std::string to_string(EstimatorKind estimator) {
    return estimator == EstimatorKind::Perfect ? "perfect" : "ping";
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, target);
}

}  // namespace econcast::io
