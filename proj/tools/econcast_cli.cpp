// Command-line front end: experiment orchestration and result emission.
//
// Exit codes: 0 success, 2 configuration error, 3 computation/domain error,
// 4 I/O error. Failures also emit a one-line JSON error object on stderr.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include "CLI11.hpp"

#include "econcast/analytics.hpp"
#include "econcast/config_io.hpp"
#include "econcast/gibbs.hpp"
#include "econcast/oracle.hpp"
#include "econcast/simulator.hpp"

using namespace econcast;
using nlohmann::json;

namespace {

struct OutputOptions {
    std::string output;
    std::string format = "json";
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--output,-o", out.output,
                    "Output file (default: $ECONCAST_OUTPUT_DIR/<command>.<ext> if the "
                    "environment variable is set, otherwise stdout)");
    cmd->add_option("--format", out.format, "Output format: json or csv (sweep only)")
        ->check(CLI::IsMember({"json", "csv"}));
}

// Writes the artifact atomically when a path is configured, otherwise prints
// it after the summary line.
void emit(const OutputOptions& out, const std::string& command, const std::string& body,
          const std::string& extension) {
    std::string path = out.output;
    if (path.empty()) {
        if (const char* dir = std::getenv("ECONCAST_OUTPUT_DIR")) {
            path = (std::filesystem::path(dir) / (command + "." + extension)).string();
        }
    }
    if (path.empty()) {
        std::cout << body << '\n';
    } else {
        io::write_file_atomic(path, body);
    }
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list: '" + csv + "'");
    return out;
}

StepRule make_step_rule(const std::string& name, double scale) {
    if (name == "adaptive") return StepRule::adaptive();
    if (name == "harmonic") return StepRule::harmonic(scale);
    if (name == "log_harmonic") return StepRule::log_harmonic(scale);
    if (name == "constant") return StepRule::constant(scale);
    throw std::invalid_argument("unknown step rule '" + name + "'");
}

int run_oracle(const std::string& config_path, const std::string& mode_word,
               const OutputOptions& out) {
    const NetworkConfig cfg = io::load_network_config(config_path);
    const ThroughputMode mode = io::parse_mode(mode_word);
    json body;
    if (cfg.topology.is_clique()) {
        const OracleSolution sol =
            mode == ThroughputMode::Groupput ? solve_groupput_lp(cfg) : solve_anyput_lp(cfg);
        std::cout << "oracle " << mode_word << " throughput " << sol.throughput << '\n';
        body = io::to_json(sol);
    } else {
        if (mode != ThroughputMode::Groupput) {
            throw std::invalid_argument("graph topologies support groupput bounds only");
        }
        const NoncliqueBounds bounds = nonclique_bounds(cfg);
        std::cout << "oracle groupput bounds [" << bounds.lower.throughput << ", "
                  << bounds.upper.throughput << "]\n";
        body = io::to_json(bounds);
    }
    emit(out, "oracle", body.dump(2), "json");
    return 0;
}

int run_gibbs(const std::string& config_path, double sigma, const std::string& mode_word,
              const std::string& step, double step_scale, int max_iters, double stop_tol,
              const OutputOptions& out) {
    const NetworkConfig cfg = io::load_network_config(config_path);
    const auto result = gradient_descent(cfg, sigma, io::parse_mode(mode_word),
                                         make_step_rule(step, step_scale), max_iters, stop_tol);
    std::cout << "gibbs " << mode_word << " sigma " << sigma << " throughput "
              << result.throughput << (result.converged ? "" : " (not converged)") << '\n';
    emit(out, "gibbs", io::to_json(result).dump(2), "json");
    return 0;
}

struct SimOverrides {
    std::string sigma, seed, duration, mode, variant, estimator;
};

int run_simulate(const std::string& config_path, const SimOverrides& ov,
                 const OutputOptions& out, const std::string& trace_path) {
    SimConfig cfg = io::load_sim_config(config_path);
    if (!ov.sigma.empty()) cfg.sigma = std::stod(ov.sigma);
    if (!ov.seed.empty()) cfg.seed = std::stoull(ov.seed);
    if (!ov.duration.empty()) cfg.duration = io::parse_duration(json(ov.duration));
    if (!ov.mode.empty()) cfg.mode = io::parse_mode(ov.mode);
    if (!ov.variant.empty()) cfg.variant = io::parse_variant(ov.variant);
    if (!ov.estimator.empty()) cfg.estimator = io::parse_estimator(ov.estimator);
    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path, std::ios::trunc);
        if (!trace) throw std::runtime_error("cannot open trace file " + trace_path);
        trace << "time,node,old,new\n";
        cfg.event_trace = &trace;
    }
    const SimMetrics metrics = run_simulation(cfg);
    std::cout << "simulate groupput " << metrics.groupput << " anyput " << metrics.anyput
              << " events " << metrics.events << '\n';
    json body = io::to_json(metrics);
    body["config"] = io::to_json(cfg);
    emit(out, "simulate", body.dump(2), "json");
    return 0;
}

int run_balance(const std::string& config_path, double sigma, const std::string& mode_word,
                const std::string& variant_word, const std::string& eta_csv,
                const OutputOptions& out) {
    const NetworkConfig cfg = io::load_network_config(config_path);
    Multipliers eta = Multipliers::zeros(cfg.node_count());
    if (!eta_csv.empty()) eta.eta = parse_list(eta_csv);
    const auto report = verify_detailed_balance(cfg, eta, sigma, io::parse_variant(variant_word),
                                                io::parse_mode(mode_word));
    std::cout << "balance max violation " << report.max_relative_violation << " over "
              << report.pairs_checked << " pairs\n";
    emit(out, "balance", io::to_json(report).dump(2), "json");
    return 0;
}

int run_burstiness(const std::string& config_path, double sigma, const std::string& mode_word,
                   bool simulate, double duration, std::uint64_t seed,
                   const OutputOptions& out) {
    const NetworkConfig net = io::load_network_config(config_path);
    const ThroughputMode mode = io::parse_mode(mode_word);
    const auto gibbs = gradient_descent(net, sigma, mode);
    json body;
    if (simulate) {
        SimConfig sim;
        sim.network = net;
        sim.sigma = sigma;
        sim.mode = mode;
        sim.duration = duration;
        sim.seed = seed;
        const auto metrics = run_simulation(sim);
        const auto rep = burstiness_report(gibbs.distribution, sigma, mode, net, metrics);
        std::cout << "burstiness analytic " << rep.analytic_mean << " empirical "
                  << rep.empirical_mean << '\n';
        body = io::to_json(rep);
    } else {
        const double analytic = analytic_burst_length(gibbs.distribution, sigma, mode, net);
        std::cout << "burstiness analytic " << analytic << '\n';
        body = {{"mode", mode_word}, {"sigma", sigma}, {"analytic_mean", analytic}};
    }
    if (!gibbs.converged) body["warning"] = "gibbs solve did not converge";
    emit(out, "burstiness", body.dump(2), "json");
    return 0;
}

int run_schedule(const std::string& config_path, const std::string& mode_word,
                 double slot_length, std::int64_t max_denominator, const OutputOptions& out) {
    const NetworkConfig cfg = io::load_network_config(config_path);
    const ThroughputMode mode = io::parse_mode(mode_word);
    const OracleSolution sol =
        mode == ThroughputMode::Groupput ? solve_groupput_lp(cfg) : solve_anyput_lp(cfg);
    const auto sched = build_periodic_schedule(sol, slot_length, max_denominator);
    const auto audit = audit_schedule(sched, cfg, sol);
    std::cout << "schedule period " << sched.period << " groupput " << audit.groupput
              << (audit.ok ? "" : " AUDIT-FAILED") << '\n';
    json body = io::to_json(sched);
    body["audit_ok"] = audit.ok;
    body["audit_violations"] = audit.violations;
    body["solution"] = io::to_json(sol);
    emit(out, "schedule", body.dump(2), "json");
    return audit.ok ? 0 : 3;
}

int run_validate(const std::string& config_path, const OutputOptions& out) {
    const json j = io::load_json(config_path);
    json normalized;
    if (j.contains("network") || j.contains("duration")) {
        normalized = io::to_json(io::parse_sim_config(j));
        std::cout << "valid simulation config\n";
    } else {
        normalized = io::to_json(io::parse_network_config(j));
        std::cout << "valid network config\n";
    }
    emit(out, "validate", normalized.dump(2), "json");
    return 0;
}

int run_sweep(const std::string& h_csv, const std::string& sigma_csv, int replicates, int nodes,
              const std::string& mode_word, std::uint64_t seed, int jobs,
              const std::vector<std::string>& baselines, const OutputOptions& out) {
    const auto hs = parse_list(h_csv);
    const auto sigmas = parse_list(sigma_csv);
    const ThroughputMode mode = io::parse_mode(mode_word);
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");

    struct Task {
        double h;
        double sigma;
        int replicate;
    };
    std::vector<Task> tasks;
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
        for (double sigma : sigmas) {
            for (int r = 0; r < replicates; ++r) tasks.push_back({hs[hi], sigma, r});
        }
    }
    std::vector<RatioSample> samples(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= tasks.size()) return;
            const Task& t = tasks[k];
            // One RNG stream per (h, replicate): sigma reuses the same network.
            const auto h_index = static_cast<std::uint64_t>(
                std::find(hs.begin(), hs.end(), t.h) - hs.begin());
            Rng rng = Rng::derive(seed, h_index * 1000003ULL +
                                            static_cast<std::uint64_t>(t.replicate));
            const NetworkConfig net = sample_heterogeneous_network(t.h, nodes, rng);
            const double oracle = (mode == ThroughputMode::Groupput
                                       ? solve_groupput_lp(net)
                                       : solve_anyput_lp(net))
                                      .throughput;
            const auto gibbs = gradient_descent(net, t.sigma, mode);
            samples[k] = RatioSample{t.h, t.sigma, gibbs.throughput, oracle, std::nullopt};
        }
    };
    const int thread_count = std::max(1, std::min<int>(jobs, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int i = 1; i < thread_count; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const auto rows = normalized_report(samples);
    std::map<std::string, double> baseline_values;
    for (const auto& b : baselines) {
        const auto eq = b.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("baseline must look like name=value, got '" + b + "'");
        }
        baseline_values[b.substr(0, eq)] = std::stod(b.substr(eq + 1));
    }

    std::string body;
    if (out.format == "csv") {
        std::ostringstream csv;
        csv << "h,sigma,replicates,mean_ratio,ci_half_width";
        for (const auto& [name, _] : baseline_values) csv << ",x_vs_" << name;
        csv << '\n';
        for (const auto& row : rows) {
            csv << row.label << ',' << row.sigma << ',' << row.replicates << ','
                << row.mean_ratio << ',' << row.ci_half_width;
            for (const auto& [_, v] : baseline_values) csv << ',' << row.mean_ratio / v;
            csv << '\n';
        }
        body = csv.str();
    } else {
        json arr = json::array();
        for (const auto& row : rows) {
            json r{{"h", row.label},
                   {"sigma", row.sigma},
                   {"replicates", row.replicates},
                   {"mean_ratio", row.mean_ratio},
                   {"ci_half_width", row.ci_half_width},
                   {"degenerate", row.degenerate}};
            for (const auto& [name, v] : baseline_values) r["x_vs_" + name] = row.mean_ratio / v;
            arr.push_back(r);
        }
        body = arr.dump(2);
    }
    std::cout << "sweep " << rows.size() << " rows over " << tasks.size() << " solves\n";
    emit(out, "sweep", body, out.format == "csv" ? "csv" : "json");
    return 0;
}

json error_json(const std::string& kind, const std::string& message, int code) {
    return {{"error", kind}, {"message", message}, {"code", code}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "econcast: oracle throughput, sigma-perturbed solutions and protocol simulation "
        "for energy-constrained broadcast networks"};
    app.require_subcommand(1);

    std::string config_path, mode = "groupput", variant = "capture", estimator = "perfect";
    std::string step = "adaptive", eta_csv, trace_path;
    std::string h_csv = "10", sigma_csv = "0.5";
    double sigma = 0.5, step_scale = 1.0, stop_tol = 1e-7, slot_length = 1e-3;
    double duration = 1e5;
    std::uint64_t seed = 0;
    int max_iters = 100000, replicates = 10, nodes = 5, jobs = 1;
    std::int64_t max_denominator = 10000;
    bool with_sim = false;
    std::vector<std::string> baselines;
    OutputOptions out;

    auto* oracle_cmd = app.add_subcommand("oracle", "Solve the oracle throughput LP");
    oracle_cmd->add_option("--config", config_path, "Network config JSON")->required();
    oracle_cmd->add_option("--mode", mode, "groupput|anyput");
    add_output_flags(oracle_cmd, out);

    auto* gibbs_cmd =
        app.add_subcommand("gibbs", "Solve the sigma-perturbed problem by dual descent");
    gibbs_cmd->add_option("--config", config_path, "Network config JSON")->required();
    gibbs_cmd->add_option("--sigma", sigma, "Entropy weight")->required();
    gibbs_cmd->add_option("--mode", mode, "groupput|anyput");
    gibbs_cmd->add_option("--step", step, "adaptive|harmonic|log_harmonic|constant");
    gibbs_cmd->add_option("--step-scale", step_scale, "Schedule scale");
    gibbs_cmd->add_option("--max-iters", max_iters, "Iteration cap");
    gibbs_cmd->add_option("--stop-tol", stop_tol, "Convergence tolerance");
    add_output_flags(gibbs_cmd, out);

    SimOverrides ov;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the protocol simulator");
    sim_cmd->add_option("--config", config_path, "Simulation config JSON")->required();
    sim_cmd->add_option("--sigma", ov.sigma, "Override sigma");
    sim_cmd->add_option("--seed", ov.seed, "Override seed");
    sim_cmd->add_option("--duration", ov.duration, "Override duration (accepts unit suffixes)");
    sim_cmd->add_option("--mode", ov.mode, "Override mode");
    sim_cmd->add_option("--variant", ov.variant, "Override variant");
    sim_cmd->add_option("--estimator", ov.estimator, "Override estimator: perfect|ping");
    sim_cmd->add_option("--trace", trace_path, "Write an event trace CSV to this path");
    add_output_flags(sim_cmd, out);

    auto* balance_cmd =
        app.add_subcommand("balance", "Exhaustive detailed-balance verification");
    balance_cmd->add_option("--config", config_path, "Network config JSON")->required();
    balance_cmd->add_option("--sigma", sigma, "Entropy weight")->required();
    balance_cmd->add_option("--mode", mode, "groupput|anyput");
    balance_cmd->add_option("--variant", variant, "capture|noncapture");
    balance_cmd->add_option("--eta", eta_csv, "Comma-separated multipliers (default zeros)");
    add_output_flags(balance_cmd, out);

    auto* burst_cmd = app.add_subcommand("burstiness", "Analytic (and simulated) burst length");
    burst_cmd->add_option("--config", config_path, "Network config JSON")->required();
    burst_cmd->add_option("--sigma", sigma, "Entropy weight")->required();
    burst_cmd->add_option("--mode", mode, "groupput|anyput");
    burst_cmd->add_flag("--simulate", with_sim, "Also measure the empirical burst length");
    burst_cmd->add_option("--duration", duration, "Simulated seconds for --simulate");
    burst_cmd->add_option("--seed", seed, "Simulation seed");
    add_output_flags(burst_cmd, out);

    auto* sched_cmd = app.add_subcommand("schedule", "Build the oracle periodic schedule");
    sched_cmd->add_option("--config", config_path, "Network config JSON")->required();
    sched_cmd->add_option("--mode", mode, "groupput|anyput");
    sched_cmd->add_option("--slot-length", slot_length, "Slot length in seconds");
    sched_cmd->add_option("--max-denominator", max_denominator, "Rationalization bound");
    add_output_flags(sched_cmd, out);

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Heterogeneity/sigma sweep of achievable-vs-oracle ratios");
    sweep_cmd->set_help_flag("--help", "Print this help message and exit");
    sweep_cmd->add_option("--h", h_csv, "Comma-separated heterogeneity values");
    sweep_cmd->add_option("--sigma", sigma_csv, "Comma-separated sigma values");
    sweep_cmd->add_option("--replicates", replicates, "Network samples per (h, sigma)");
    sweep_cmd->add_option("--nodes", nodes, "Nodes per sampled network");
    sweep_cmd->add_option("--mode", mode, "groupput|anyput");
    sweep_cmd->add_option("--seed", seed, "Base seed for network sampling");
    sweep_cmd->add_option("--jobs", jobs, "Concurrent solver threads");
    sweep_cmd->add_option("--baseline", baselines,
                          "name=ratio comparison constants (repeatable)");
    add_output_flags(sweep_cmd, out);

    auto* validate_cmd = app.add_subcommand("validate", "Validate and normalize a config");
    validate_cmd->add_option("--config", config_path, "Config JSON")->required();
    add_output_flags(validate_cmd, out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (out.format == "csv" && !sweep_cmd->parsed()) {
            throw std::invalid_argument("csv output is supported for the sweep command only");
        }
        if (oracle_cmd->parsed()) return run_oracle(config_path, mode, out);
        if (gibbs_cmd->parsed()) {
            return run_gibbs(config_path, sigma, mode, step, step_scale, max_iters, stop_tol,
                             out);
        }
        if (sim_cmd->parsed()) return run_simulate(config_path, ov, out, trace_path);
        if (balance_cmd->parsed()) {
            return run_balance(config_path, sigma, mode, variant, eta_csv, out);
        }
        if (burst_cmd->parsed()) {
            return run_burstiness(config_path, sigma, mode, with_sim, duration, seed, out);
        }
        if (sched_cmd->parsed()) {
            return run_schedule(config_path, mode, slot_length, max_denominator, out);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(h_csv, sigma_csv, replicates, nodes, mode, seed, jobs, baselines,
                             out);
        }
        if (validate_cmd->parsed()) return run_validate(config_path, out);
        std::cerr << error_json("usage", "no subcommand", 2).dump() << '\n';
        return 2;
    } catch (const io::ConfigError& e) {
        json err = error_json("config", e.what(), 2);
        err["diagnostics"] = e.diagnostics();
        std::cerr << err.dump() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << error_json("domain", e.what(), 3).dump() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << error_json("invalid", e.what(), 3).dump() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << error_json("io", e.what(), 4).dump() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << error_json("runtime", e.what(), 3).dump() << '\n';
        return 3;
    }
}
