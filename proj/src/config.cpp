#include "damt/config.hpp"

#include <fstream>

namespace damt {

namespace {

using nlohmann::json;

const json& require_key(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw config_error(std::string("config is missing \"") + key + "\"");
    }
    return *it;
}

Rat rat_field(const json& doc, const char* key) {
    const json& value = require_key(doc, key);
    if (value.is_string()) {
        return Rat::parse(value.get<std::string>());
    }
    if (value.is_number_integer()) {
        return Rat(value.get<std::int64_t>());
    }
    throw config_error(std::string("\"") + key + "\" must be a decimal string");
}

int int_field(const json& doc, const char* key) {
    const json& value = require_key(doc, key);
    if (!value.is_number_integer()) {
        throw config_error(std::string("\"") + key + "\" must be an integer");
    }
    return value.get<int>();
}

std::vector<Rat> rat_list(const json& value, const char* key) {
    if (!value.is_array()) {
        throw config_error(std::string("\"") + key + "\" must be a list");
    }
    std::vector<Rat> items;
    items.reserve(value.size());
    for (const json& entry : value) {
        if (entry.is_string()) {
            items.push_back(Rat::parse(entry.get<std::string>()));
        } else if (entry.is_number_integer()) {
            items.push_back(Rat(entry.get<std::int64_t>()));
        } else {
            throw config_error(std::string("\"") + key + "\" must hold decimal strings");
        }
    }
    return items;
}

std::vector<int> int_list(const json& value, const char* key) {
    if (!value.is_array()) {
        throw config_error(std::string("\"") + key + "\" must be a list of indices");
    }
    std::vector<int> items;
    items.reserve(value.size());
    for (const json& entry : value) {
        if (!entry.is_number_integer()) {
            throw config_error(std::string("\"") + key + "\" must be a list of indices");
        }
        items.push_back(entry.get<int>());
    }
    return items;
}

std::vector<int> identity_order(int size) {
    std::vector<int> order(size);
    for (int k = 0; k < size; ++k) order[k] = k;
    return order;
}

json parse_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open '" + path + "'");
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        throw config_error("'" + path + "' is not valid JSON");
    }
    return doc;
}

}  // namespace

Mechanism mechanism_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw config_error("mechanism config must be a JSON object");
    }
    const json& kind_value = require_key(doc, "kind");
    if (!kind_value.is_string()) {
        throw config_error("\"kind\" must be a string");
    }
    const std::string kind = kind_value.get<std::string>();

    if (kind == "bilateral_posted") {
        return make_bilateral_posted_price(rat_field(doc, "pi"));
    }
    if (kind == "example1") {
        return make_paired_posted_price(rat_field(doc, "pi1"), rat_field(doc, "pi2"));
    }
    if (kind == "example2") {
        return make_spread_posted_price(rat_field(doc, "pi_s"), rat_field(doc, "pi_b"));
    }
    if (kind == "example3") {
        return make_low_bid_price();
    }
    if (kind == "example4") {
        return make_two_tier_posted_price(rat_field(doc, "pi"), rat_field(doc, "pi_prime"));
    }
    if (kind == "generalized_posted") {
        MarketShape shape{int_field(doc, "m"), int_field(doc, "n")};
        const json& entries = require_key(doc, "price_map");
        if (!entries.is_array() || entries.empty()) {
            throw config_error("\"price_map\" must be a nonempty list");
        }
        GeneralizedPostedPriceParams params;
        for (const json& entry : entries) {
            TraderSetPrice tsp;
            tsp.traders.sellers = int_list(require_key(entry, "sellers"), "sellers");
            tsp.traders.buyers = int_list(require_key(entry, "buyers"), "buyers");
            tsp.price = rat_field(entry, "price");
            params.entries.push_back(std::move(tsp));
        }
        return make_generalized_posted_price(shape, std::move(params));
    }
    if (kind == "linear_price") {
        auto parsed = linear_price_params_from_json(doc);
        return make_linear_price(parsed->first, std::move(parsed->second));
    }
    throw config_error("unknown mechanism kind '" + kind + "'");
}

std::optional<std::pair<MarketShape, LinearPriceParams>> linear_price_params_from_json(
    const json& doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string() ||
        doc.at("kind").get<std::string>() != "linear_price") {
        return std::nullopt;
    }
    MarketShape shape{int_field(doc, "m"), int_field(doc, "n")};
    LinearPriceParams params;
    params.seller_coeffs = rat_list(require_key(doc, "c"), "c");
    params.buyer_coeffs = rat_list(require_key(doc, "d"), "d");
    params.seller_priority =
        doc.contains("sigma") ? int_list(doc.at("sigma"), "sigma") : identity_order(shape.sellers);
    params.buyer_priority =
        doc.contains("beta") ? int_list(doc.at("beta"), "beta") : identity_order(shape.buyers);
    if (doc.contains("fallback_price")) {
        params.fallback_price = rat_field(doc, "fallback_price");
    }
    return std::make_pair(shape, std::move(params));
}

Mechanism load_mechanism(const std::string& path) {
    return mechanism_from_json(parse_document(path));
}

Grid grid_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw config_error("grid file must be a JSON object");
    }
    auto axes = [](const json& lists, const char* key) {
        if (!lists.is_array() || lists.empty()) {
            throw config_error(std::string("\"") + key + "\" must be a nonempty list of lists");
        }
        std::vector<std::vector<Rat>> result;
        for (const json& one : lists) {
            result.push_back(rat_list(one, key));
        }
        return result;
    };
    return Grid::from_points(axes(require_key(doc, "seller_points"), "seller_points"),
                             axes(require_key(doc, "buyer_points"), "buyer_points"));
}

Grid load_grid(const std::string& path) {
    return grid_from_json(parse_document(path));
}

}  // namespace damt
