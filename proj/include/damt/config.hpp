#pragma once

#include <string>

#include "damt/grid.hpp"
#include "damt/mechanisms.hpp"

#include "json.hpp"

namespace damt {

// Mechanism configuration document. "kind" selects the constructor:
// bilateral_posted, example1, example2, example3, example4,
// generalized_posted, linear_price. Numeric parameters are decimal (or
// "p/q") strings; player indices are 0-based; permutations are index lists
// in priority order.
Mechanism mechanism_from_json(const nlohmann::json& doc);
Mechanism load_mechanism(const std::string& path);

// Present when the document's kind is "linear_price"; lets callers rerun
// the priced trace (tentative volume, realized price) behind the outcome.
std::optional<std::pair<MarketShape, LinearPriceParams>> linear_price_params_from_json(
    const nlohmann::json& doc);

// Explicit per-player grid: {"seller_points": [[...], ...],
// "buyer_points": [[...], ...]} with one ascending list per player.
Grid grid_from_json(const nlohmann::json& doc);
Grid load_grid(const std::string& path);

}  // namespace damt
