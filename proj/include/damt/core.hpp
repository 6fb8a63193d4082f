#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "damt/errors.hpp"
#include "damt/rational.hpp"

namespace damt {

// Market dimensions: m sellers, each owning one unit, and n buyers, each
// demanding at most one unit.
struct MarketShape {
    int sellers = 1;
    int buyers = 1;

    int players() const { return sellers + buyers; }
    bool operator==(const MarketShape&) const = default;
};

void validate_shape(const MarketShape& shape);

enum class Side : std::uint8_t { seller, buyer };

struct PlayerId {
    Side side = Side::seller;
    int index = 0;

    // Sellers order before buyers, then by index.
    auto operator<=>(const PlayerId&) const = default;
};

// Rendered 1-based: "s1", "b2".
std::string player_label(const PlayerId& id);
std::optional<PlayerId> parse_player_label(const std::string& label);

// One point v = (s, b) in [0,1]^(m+n).
struct ValuationProfile {
    std::vector<Rat> sellers;
    std::vector<Rat> buyers;

    MarketShape shape() const {
        return {static_cast<int>(sellers.size()), static_cast<int>(buyers.size())};
    }
    const Rat& value(const PlayerId& id) const {
        return id.side == Side::seller ? sellers.at(id.index) : buyers.at(id.index);
    }
    Rat& value(const PlayerId& id) {
        return id.side == Side::seller ? sellers.at(id.index) : buyers.at(id.index);
    }
    bool operator==(const ValuationProfile&) const = default;
};

// Lexicographic over sellers then buyers; the checkers' canonical order.
std::strong_ordering compare_profiles(const ValuationProfile& a, const ValuationProfile& b);

void validate_profile(const ValuationProfile& v, const MarketShape& shape);

// Allocation bits and transfers for one profile. x[i] is what seller i
// receives, y[j] is what buyer j pays; either may be negative.
struct Outcome {
    std::vector<std::uint8_t> seller_trades;  // p, one bit per seller
    std::vector<std::uint8_t> buyer_trades;   // q, one bit per buyer
    std::vector<Rat> seller_receipts;         // x
    std::vector<Rat> buyer_payments;          // y

    static Outcome no_trade(const MarketShape& shape);
    bool operator==(const Outcome&) const = default;
};

// Index sets of the trading players, ascending.
struct TraderSet {
    std::vector<int> sellers;
    std::vector<int> buyers;

    bool empty() const { return sellers.empty() && buyers.empty(); }
    auto operator<=>(const TraderSet&) const = default;
};

TraderSet trader_set(const Outcome& out);

// Rendered 1-based: "S{1,2}B{1}".
std::string trader_set_label(const TraderSet& ts);

using MechanismRule = std::function<Outcome(const ValuationProfile&)>;

// Fixed priority orders used when one market side must be rationed;
// priority.front() trades first.
struct RationingPriorities {
    std::vector<int> sellers;
    std::vector<int> buyers;
};

// A deterministic double auction mechanism: a pure map from valuation
// profiles to outcomes, plus the metadata the toolkit needs (parameter echo
// for reports, constant prices for grid straddling, declared rationing
// priorities for the value-respecting audit).
class Mechanism {
public:
    Mechanism(std::string name, MarketShape shape, MechanismRule rule);

    Mechanism& set_params(std::vector<std::pair<std::string, std::string>> params);
    Mechanism& set_price_hints(std::vector<Rat> prices);
    Mechanism& set_rationing(RationingPriorities priorities);

    const std::string& name() const { return name_; }
    const MarketShape& shape() const { return shape_; }
    const std::vector<std::pair<std::string, std::string>>& params() const { return params_; }
    const std::vector<Rat>& price_hints() const { return price_hints_; }
    const std::optional<RationingPriorities>& rationing() const { return rationing_; }

    // Validates the profile against the shape, runs the rule, and validates
    // the outcome's dimensions and allocation bits.
    Outcome evaluate(const ValuationProfile& v) const;

private:
    std::string name_;
    MarketShape shape_;
    MechanismRule rule_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<Rat> price_hints_;
    std::optional<RationingPriorities> rationing_;
};

// u_i(v) = x_i(v) - p_i(v) * s_i
Rat seller_payoff(const Outcome& out, const ValuationProfile& v, int i);
// u_j(v) = q_j(v) * b_j - y_j(v)
Rat buyer_payoff(const Outcome& out, const ValuationProfile& v, int j);
Rat player_payoff(const Outcome& out, const ValuationProfile& v, const PlayerId& id);

Rat seller_payoff(const Mechanism& mech, const ValuationProfile& v, int i);
Rat buyer_payoff(const Mechanism& mech, const ValuationProfile& v, int j);

// Payoff of the player when the outcome was produced from a misreport but
// the payoff is evaluated at the player's true valuation.
Rat player_payoff_with_true_value(const Outcome& out, const PlayerId& id, const Rat& true_value);

const Rat& player_transfer(const Outcome& out, const PlayerId& id);
bool player_trades(const Outcome& out, const PlayerId& id);

}  // namespace damt
