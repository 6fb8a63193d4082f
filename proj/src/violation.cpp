#include "damt/violation.hpp"

namespace damt {

std::string_view property_token(Property p) {
    switch (p) {
        case Property::ic: return "ic";
        case Property::ir: return "ir";
        case Property::bb: return "bb";
        case Property::nw: return "nw";
        case Property::common_price: return "a1";
        case Property::worst_type_zero: return "a2";
        case Property::nonbossy: return "a3";
        case Property::allocation_monotone: return "lemma1_monotone";
        case Property::payoff_envelope: return "lemma1_envelope";
        case Property::trade_structure: return "prop1";
        case Property::set_price_constancy: return "prop2";
        case Property::value_respecting: return "value_respecting";
    }
    return "?";
}

std::optional<Property> parse_property_token(std::string_view token) {
    for (Property p : {Property::ic, Property::ir, Property::bb, Property::nw,
                       Property::common_price, Property::worst_type_zero, Property::nonbossy,
                       Property::allocation_monotone, Property::payoff_envelope,
                       Property::trade_structure, Property::set_price_constancy,
                       Property::value_respecting}) {
        if (property_token(p) == token) return p;
    }
    return std::nullopt;
}

bool violation_less(const Violation& a, const Violation& b) {
    if (auto c = compare_profiles(a.profile, b.profile); c != 0) return c < 0;
    if (a.player.has_value() != b.player.has_value()) return !a.player.has_value();
    if (a.player && b.player && *a.player != *b.player) return *a.player < *b.player;
    if (a.deviation.has_value() != b.deviation.has_value()) return !a.deviation.has_value();
    if (a.deviation && b.deviation && *a.deviation != *b.deviation) {
        return *a.deviation < *b.deviation;
    }
    if (a.note != b.note) return a.note < b.note;
    if (a.alt_profile.has_value() != b.alt_profile.has_value()) return !a.alt_profile.has_value();
    if (a.alt_profile && b.alt_profile) {
        if (auto c = compare_profiles(*a.alt_profile, *b.alt_profile); c != 0) return c < 0;
    }
    return a.detail < b.detail;
}

}  // namespace damt
