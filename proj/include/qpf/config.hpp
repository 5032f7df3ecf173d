#ifndef QPF_CONFIG_HPP
#define QPF_CONFIG_HPP

#include <string>

#include <json.hpp>

#include "qpf/classify.hpp"

// JSON config loading for map/cocycle definitions and JSON report emission.
// Every emitted document carries schema_version.

namespace qpf {

inline constexpr const char* kSchemaVersion = "1";

// Numeric config values are either JSON numbers or DSL constant expressions
// such as "(5^0.5 - 1)/2".
double config_number(const nlohmann::json& v, const std::string& what);

// family: rigid | skew | arnold | attracting_graph | custom | conjugated | projective
System load_system(const nlohmann::json& config);
System load_system_file(const std::string& path);

CocycleSpec load_cocycle(const nlohmann::json& config);
CocycleSpec load_cocycle_file(const std::string& path);

nlohmann::json to_json(const RotationEstimate& est);
nlohmann::json to_json(const RationalRelation& rel);
nlohmann::json to_json(const DeviationProfile& prof);
nlohmann::json to_json(const RegularityVerdict& verdict);
nlohmann::json to_json(const LyapunovEstimate& est);
nlohmann::json to_json(const BoxScanResult& scan);
nlohmann::json to_json(const StripSearchResult& res);
nlohmann::json to_json(const PullbackResult& res);
nlohmann::json to_json(const DefectReport& rep, const StripFamily& family);
nlohmann::json to_json(const ClassificationReport& rep);

// wraps a payload with schema_version and echoes the seed
nlohmann::json make_document(const std::string& kind, nlohmann::json payload,
                             long long seed = 0);

}  // namespace qpf

#endif
