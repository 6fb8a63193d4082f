#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "damt/core.hpp"

namespace damt {

// Every auditable property. The short report tokens ("a1", "prop2", ...)
// are the external names used by the CLI and in written reports.
enum class Property {
    ic,                   // truthful reporting is a dominant strategy
    ir,                   // no player ever ends with a negative payoff
    bb,                   // seller receipts and buyer payments always balance
    nw,                   // units sold equal units bought at every profile
    common_price,         // token "a1": one receipt for all trading sellers, one payment for all trading buyers
    worst_type_zero,      // token "a2": valuation-1 sellers and valuation-0 buyers get exactly zero
    nonbossy,             // token "a3": nobody can move others' transfers while own allocation and transfer stand still
    allocation_monotone,  // token "lemma1_monotone": seller allocation falls, buyer allocation rises in own value
    payoff_envelope,      // token "lemma1_envelope": payoff matches the integral of the allocation
    trade_structure,      // token "prop1": equal volume, one price, silent bystanders, price between trader values
    set_price_constancy,  // token "prop2": each realized trader set carries one constant price
    value_respecting,     // lower-value sellers and higher-value buyers are not passed over
};

std::string_view property_token(Property p);
std::optional<Property> parse_property_token(std::string_view token);

// A typed witness of a property failure. Re-evaluating the mechanism at the
// stored profile(s) reproduces the stored evidence exactly.
struct Violation {
    Property property = Property::ic;
    ValuationProfile profile;
    std::optional<PlayerId> player;
    std::optional<Rat> deviation;              // alternative own report, when relevant
    std::optional<ValuationProfile> alt_profile;  // second profile for pairwise witnesses
    std::string note;                          // sub-clause or affected-player tag
    std::vector<std::pair<std::string, Rat>> detail;  // named numeric evidence

    bool operator==(const Violation&) const = default;
};

// Canonical order: profile, then player, then deviation, then the
// remaining fields. Checker output is sorted this way regardless of how
// many workers scanned the grid.
bool violation_less(const Violation& a, const Violation& b);

struct CheckResult {
    Property property = Property::ic;
    std::uint64_t total = 0;            // violations found across the whole grid
    bool truncated = false;             // list capped at CheckOptions::max_violations
    std::vector<Violation> violations;  // canonically sorted prefix

    bool passed() const { return total == 0; }
};

struct CheckOptions {
    int jobs = 0;                       // 0 = all available cores, 1 = serial reference path
    std::size_t max_violations = 100;   // cap on stored witnesses; the count is still exact
};

}  // namespace damt
