#include "damt/report.hpp"

namespace damt {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string require_string(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
        throw config_error(std::string("report is missing string \"") + key + "\"");
    }
    return it->get<std::string>();
}

std::uint64_t parse_count(const json& doc, const char* key) {
    const std::string text = require_string(doc, key);
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw config_error("bad count in report");
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return value;
}

ordered_json rat_list_to_json(const std::vector<Rat>& values) {
    ordered_json list = ordered_json::array();
    for (const Rat& r : values) list.push_back(r.str());
    return list;
}

std::vector<Rat> rat_list_from_json(const json& doc) {
    std::vector<Rat> values;
    for (const json& entry : doc) values.push_back(Rat::parse(entry.get<std::string>()));
    return values;
}

}  // namespace

bool Report::all_passed() const {
    for (const auto& row : results) {
        if (!row.result.passed()) return false;
    }
    return true;
}

ordered_json profile_to_json(const ValuationProfile& v) {
    ordered_json doc;
    doc["s"] = rat_list_to_json(v.sellers);
    doc["b"] = rat_list_to_json(v.buyers);
    return doc;
}

ValuationProfile profile_from_json(const json& doc) {
    ValuationProfile v;
    v.sellers = rat_list_from_json(doc.at("s"));
    v.buyers = rat_list_from_json(doc.at("b"));
    return v;
}

ordered_json violation_to_json(const Violation& viol) {
    ordered_json doc;
    doc["property"] = std::string(property_token(viol.property));
    doc["profile"] = profile_to_json(viol.profile);
    doc["player"] = viol.player ? ordered_json(player_label(*viol.player)) : ordered_json(nullptr);
    doc["deviation"] = viol.deviation ? ordered_json(viol.deviation->str()) : ordered_json(nullptr);
    doc["alt_profile"] =
        viol.alt_profile ? profile_to_json(*viol.alt_profile) : ordered_json(nullptr);
    doc["note"] = viol.note;
    ordered_json detail = ordered_json::array();
    for (const auto& [key, value] : viol.detail) {
        detail.push_back(ordered_json::array({key, value.str()}));
    }
    doc["detail"] = detail;
    return doc;
}

Violation violation_from_json(const json& doc) {
    Violation viol;
    const auto property = parse_property_token(require_string(doc, "property"));
    if (!property) throw config_error("unknown property in report");
    viol.property = *property;
    viol.profile = profile_from_json(doc.at("profile"));
    if (!doc.at("player").is_null()) {
        const auto id = parse_player_label(doc.at("player").get<std::string>());
        if (!id) throw config_error("bad player label in report");
        viol.player = *id;
    }
    if (!doc.at("deviation").is_null()) {
        viol.deviation = Rat::parse(doc.at("deviation").get<std::string>());
    }
    if (!doc.at("alt_profile").is_null()) {
        viol.alt_profile = profile_from_json(doc.at("alt_profile"));
    }
    viol.note = doc.at("note").get<std::string>();
    for (const json& entry : doc.at("detail")) {
        viol.detail.emplace_back(entry.at(0).get<std::string>(),
                                 Rat::parse(entry.at(1).get<std::string>()));
    }
    return viol;
}

ordered_json deviation_to_json(const Deviation& dev) {
    ordered_json doc;
    doc["player"] = player_label(dev.player);
    doc["profile"] = profile_to_json(dev.profile);
    doc["report"] = dev.report.str();
    doc["gain"] = dev.gain.str();
    return doc;
}

Deviation deviation_from_json(const json& doc) {
    Deviation dev;
    const auto id = parse_player_label(require_string(doc, "player"));
    if (!id) throw config_error("bad player label in report");
    dev.player = *id;
    dev.profile = profile_from_json(doc.at("profile"));
    dev.report = Rat::parse(require_string(doc, "report"));
    dev.gain = Rat::parse(require_string(doc, "gain"));
    return dev;
}

namespace {

ordered_json header_to_json(const std::string& tool_version, const std::string& mechanism_name,
                            const std::vector<std::pair<std::string, std::string>>& params,
                            const std::vector<int>& grid_points,
                            const std::string& grid_fingerprint, std::uint64_t profile_count) {
    ordered_json doc;
    doc["tool_version"] = tool_version;
    ordered_json mech;
    mech["name"] = mechanism_name;
    ordered_json echo = ordered_json::array();
    for (const auto& [key, value] : params) {
        echo.push_back(ordered_json::array({key, value}));
    }
    mech["params"] = echo;
    doc["mechanism"] = mech;
    ordered_json grid;
    grid["points_per_player"] = grid_points;
    grid["profile_count"] = std::to_string(profile_count);
    grid["fingerprint"] = grid_fingerprint;
    doc["grid"] = grid;
    return doc;
}

void header_from_json(const json& doc, std::string& tool_version, std::string& mechanism_name,
                      std::vector<std::pair<std::string, std::string>>& params,
                      std::vector<int>& grid_points, std::string& grid_fingerprint,
                      std::uint64_t& profile_count) {
    tool_version = require_string(doc, "tool_version");
    const json& mech = doc.at("mechanism");
    mechanism_name = require_string(mech, "name");
    for (const json& entry : mech.at("params")) {
        params.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::string>());
    }
    const json& grid = doc.at("grid");
    grid_points = grid.at("points_per_player").get<std::vector<int>>();
    grid_fingerprint = require_string(grid, "fingerprint");
    profile_count = parse_count(grid, "profile_count");
}

}  // namespace

ordered_json report_to_json(const Report& report) {
    ordered_json doc =
        header_to_json(report.tool_version, report.mechanism_name, report.mechanism_params,
                       report.grid_points, report.grid_fingerprint, report.profile_count);
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.results) {
        ordered_json entry;
        entry["property"] = std::string(property_token(row.result.property));
        entry["status"] = row.result.passed() ? "pass" : "fail";
        entry["total_violations"] = std::to_string(row.result.total);
        entry["truncated"] = row.result.truncated;
        ordered_json violations = ordered_json::array();
        for (const Violation& viol : row.result.violations) {
            violations.push_back(violation_to_json(viol));
        }
        entry["violations"] = violations;
        rows.push_back(entry);
    }
    doc["results"] = rows;
    return doc;
}

Report report_from_json(const json& doc) {
    Report report;
    header_from_json(doc, report.tool_version, report.mechanism_name, report.mechanism_params,
                     report.grid_points, report.grid_fingerprint, report.profile_count);
    for (const json& entry : doc.at("results")) {
        PropertyReport row;
        const auto property = parse_property_token(require_string(entry, "property"));
        if (!property) throw config_error("unknown property in report");
        row.result.property = *property;
        row.result.total = parse_count(entry, "total_violations");
        row.result.truncated = entry.at("truncated").get<bool>();
        for (const json& viol : entry.at("violations")) {
            row.result.violations.push_back(violation_from_json(viol));
        }
        const std::string status = require_string(entry, "status");
        if (status != (row.result.passed() ? "pass" : "fail")) {
            throw config_error("report status disagrees with its violation count");
        }
        report.results.push_back(std::move(row));
    }
    return report;
}

ordered_json deviation_report_to_json(const DeviationReport& report) {
    ordered_json doc =
        header_to_json(report.tool_version, report.mechanism_name, report.mechanism_params,
                       report.grid_points, report.grid_fingerprint, report.profile_count);
    doc["total_deviations"] = std::to_string(report.total);
    doc["truncated"] = report.truncated;
    ordered_json rows = ordered_json::array();
    for (const Deviation& dev : report.deviations) {
        rows.push_back(deviation_to_json(dev));
    }
    doc["deviations"] = rows;
    return doc;
}

DeviationReport deviation_report_from_json(const json& doc) {
    DeviationReport report;
    header_from_json(doc, report.tool_version, report.mechanism_name, report.mechanism_params,
                     report.grid_points, report.grid_fingerprint, report.profile_count);
    report.total = parse_count(doc, "total_deviations");
    report.truncated = doc.at("truncated").get<bool>();
    for (const json& entry : doc.at("deviations")) {
        report.deviations.push_back(deviation_from_json(entry));
    }
    return report;
}

bool reports_equal(const Report& a, const Report& b) {
    return report_to_json(a) == report_to_json(b);
}

std::string render_document(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace damt
