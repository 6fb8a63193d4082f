#pragma once

#include <string>
#include <vector>

#include "damt/search.hpp"
#include "damt/verify.hpp"

#include "json.hpp"

namespace damt {

inline constexpr const char* kToolVersion = "1.0.0";

// One checker's outcome inside a report. Wall-clock timing is kept in
// memory for progress output but never serialized: written reports are
// byte-identical across runs and worker counts.
struct PropertyReport {
    CheckResult result;
    double wall_ms = 0.0;
};

struct Report {
    std::string tool_version = kToolVersion;
    std::string mechanism_name;
    std::vector<std::pair<std::string, std::string>> mechanism_params;
    std::vector<int> grid_points;
    std::string grid_fingerprint;
    std::uint64_t profile_count = 0;
    std::vector<PropertyReport> results;

    bool all_passed() const;
};

struct DeviationReport {
    std::string tool_version = kToolVersion;
    std::string mechanism_name;
    std::vector<std::pair<std::string, std::string>> mechanism_params;
    std::vector<int> grid_points;
    std::string grid_fingerprint;
    std::uint64_t profile_count = 0;
    std::uint64_t total = 0;
    bool truncated = false;
    std::vector<Deviation> deviations;  // canonically sorted prefix
};

nlohmann::ordered_json profile_to_json(const ValuationProfile& v);
ValuationProfile profile_from_json(const nlohmann::json& doc);

nlohmann::ordered_json violation_to_json(const Violation& viol);
Violation violation_from_json(const nlohmann::json& doc);

nlohmann::ordered_json deviation_to_json(const Deviation& dev);
Deviation deviation_from_json(const nlohmann::json& doc);

nlohmann::ordered_json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

nlohmann::ordered_json deviation_report_to_json(const DeviationReport& report);
DeviationReport deviation_report_from_json(const nlohmann::json& doc);

// Serialized documents compare equal iff these do (timing is not part of
// either).
bool reports_equal(const Report& a, const Report& b);

std::string render_document(const nlohmann::ordered_json& doc);

}  // namespace damt
