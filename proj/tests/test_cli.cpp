#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_bin() {
    const char* bin = std::getenv("ECONCAST_CLI_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "ECONCAST_CLI_BIN must point at the econcast binary");
    return bin;
}

int run(const std::string& args, const std::string& stdout_file = "/tmp/econcast_cli_out.txt",
        const std::string& stderr_file = "/tmp/econcast_cli_err.txt") {
    const std::string cmd = cli_bin() + " " + args + " >" + stdout_file + " 2>" + stderr_file;
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

const char* kNet =
    R"({"homogeneous": {"count": 4, "rho": "10uW", "listen_cost": "0.5mW", "transmit_cost": "0.5mW"}})";
const char* kSim =
    R"({"network": {"homogeneous": {"count": 3, "rho": "10uW", "listen_cost": "0.5mW",
        "transmit_cost": "0.5mW"}}, "sigma": 1.0, "duration": "50s", "seed": 7,
        "freeze_multipliers": [0, 0, 0]})";

}  // namespace

TEST_CASE("oracle command prints a throughput summary and writes JSON") {
    write("/tmp/ec_net.json", kNet);
    const int rc = run("oracle --config /tmp/ec_net.json --mode groupput -o /tmp/ec_oracle.json");
    CHECK(rc == 0);
    const auto summary = slurp("/tmp/econcast_cli_out.txt");
    CHECK(summary.find("throughput") != std::string::npos);
    const auto body = slurp("/tmp/ec_oracle.json");
    CHECK(body.find("\"alpha\"") != std::string::npos);
}

TEST_CASE("repeated simulate runs are byte-identical") {
    write("/tmp/ec_sim.json", kSim);
    CHECK(run("simulate --config /tmp/ec_sim.json --seed 9 -o /tmp/ec_m1.json") == 0);
    CHECK(run("simulate --config /tmp/ec_sim.json --seed 9 -o /tmp/ec_m2.json") == 0);
    const auto a = slurp("/tmp/ec_m1.json");
    const auto b = slurp("/tmp/ec_m2.json");
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(run("simulate --config /tmp/ec_sim.json --seed 10 -o /tmp/ec_m3.json") == 0);
    CHECK(a != slurp("/tmp/ec_m3.json"));
}

TEST_CASE("input config is never mutated") {
    write("/tmp/ec_sim.json", kSim);
    const auto before = slurp("/tmp/ec_sim.json");
    CHECK(run("simulate --config /tmp/ec_sim.json -o /tmp/ec_m4.json") == 0);
    CHECK(slurp("/tmp/ec_sim.json") == before);
}

TEST_CASE("config errors exit with code 2 and a JSON diagnostic") {
    write("/tmp/ec_bad.json", R"({"nodes": [{"rho": "-3uW"}]})");
    const int rc = run("oracle --config /tmp/ec_bad.json");
    CHECK(rc == 2);
    const auto err = slurp("/tmp/econcast_cli_err.txt");
    CHECK(err.find("\"error\"") != std::string::npos);
    CHECK(err.find("listen_cost") != std::string::npos);
}

TEST_CASE("domain errors exit with code 3") {
    write("/tmp/ec_net.json", kNet);
    const int rc = run("gibbs --config /tmp/ec_net.json --sigma -1");
    CHECK(rc == 3);
}

TEST_CASE("missing file exits with code 2") {
    CHECK(run("oracle --config /tmp/definitely_not_here.json") == 2);
}

TEST_CASE("sweep emits the documented CSV header") {
    const int rc = run(
        "sweep --h 10 --sigma 0.5 --replicates 2 --nodes 3 --format csv -o /tmp/ec_sweep.csv");
    CHECK(rc == 0);
    const auto csv = slurp("/tmp/ec_sweep.csv");
    CHECK(csv.rfind("h,sigma,replicates,mean_ratio,ci_half_width\n", 0) == 0);
}

TEST_CASE("balance summary carries the violation") {
    write("/tmp/ec_net.json", kNet);
    CHECK(run("balance --config /tmp/ec_net.json --sigma 0.5") == 0);
    const auto summary = slurp("/tmp/econcast_cli_out.txt");
    CHECK(summary.find("max violation") != std::string::npos);
}

TEST_CASE("validate normalizes units to watts") {
    write("/tmp/ec_net.json", kNet);
    CHECK(run("validate --config /tmp/ec_net.json -o /tmp/ec_norm.json") == 0);
    const auto body = slurp("/tmp/ec_norm.json");
    CHECK(body.find("e-06") != std::string::npos);   // 10uW in watts
    CHECK(body.find("uW") == std::string::npos);     // suffixes are gone
    CHECK(body.find("0.0005") != std::string::npos); // 0.5mW in watts
}

TEST_CASE("normalized configs reproduce identical results") {
    write("/tmp/ec_net.json", kNet);
    CHECK(run("validate --config /tmp/ec_net.json -o /tmp/ec_rt.json") == 0);
    CHECK(run("oracle --config /tmp/ec_net.json -o /tmp/ec_o1.json") == 0);
    CHECK(run("oracle --config /tmp/ec_rt.json -o /tmp/ec_o2.json") == 0);
    CHECK(slurp("/tmp/ec_o1.json") == slurp("/tmp/ec_o2.json"));
    // and the normalized form re-validates
    CHECK(run("validate --config /tmp/ec_rt.json") == 0);
}

TEST_CASE("simulate trace has the CSV header") {
    write("/tmp/ec_sim.json", kSim);
    CHECK(run("simulate --config /tmp/ec_sim.json --duration 5s --trace /tmp/ec_trace.csv "
              "-o /tmp/ec_m5.json") == 0);
    const auto trace = slurp("/tmp/ec_trace.csv");
    CHECK(trace.rfind("time,node,old,new\n", 0) == 0);
    CHECK(trace.find(",s,l") != std::string::npos);
}
