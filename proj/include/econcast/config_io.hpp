#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "econcast/analytics.hpp"
#include "econcast/gibbs.hpp"
#include "econcast/oracle.hpp"
#include "econcast/simulator.hpp"

namespace econcast::io {

/// Validation failure carrying every diagnostic, each prefixed with the JSON
/// pointer of the offending field.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  private:
    std::vector<std::string> diagnostics_;
};

/// "10uW", "0.5mW", "2W" or a plain number (watts) -> watts.
double parse_power(const nlohmann::json& value);
/// "1ms", "8ms", "1e7s", "400us" or a plain number (seconds) -> seconds.
double parse_duration(const nlohmann::json& value);

NetworkConfig parse_network_config(const nlohmann::json& j);
SimConfig parse_sim_config(const nlohmann::json& j);

NetworkConfig load_network_config(const std::string& path);
SimConfig load_sim_config(const std::string& path);
nlohmann::json load_json(const std::string& path);

nlohmann::json to_json(const NetworkConfig& config);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const OracleSolution& solution);
nlohmann::json to_json(const NoncliqueBounds& bounds);
nlohmann::json to_json(const GibbsResult& result, bool include_distribution = true);
nlohmann::json to_json(const SimMetrics& metrics);
nlohmann::json to_json(const PeriodicSchedule& schedule);
nlohmann::json to_json(const DetailedBalanceReport& report);
nlohmann::json to_json(const LatencyReport& report);
nlohmann::json to_json(const BurstinessReport& report);

ThroughputMode parse_mode(const std::string& word);
ProtocolVariant parse_variant(const std::string& word);
EstimatorKind parse_estimator(const std::string& word);
std::string to_string(ThroughputMode mode);
std::string to_string(ProtocolVariant variant);
std::string to_string(EstimatorKind estimator);

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace econcast::io
