#include "damt/core.hpp"

#include <sstream>

namespace damt {

void validate_shape(const MarketShape& shape) {
    if (shape.sellers < 1 || shape.buyers < 1) {
        throw dimension_error("market needs at least one seller and one buyer");
    }
}

std::string player_label(const PlayerId& id) {
    return (id.side == Side::seller ? "s" : "b") + std::to_string(id.index + 1);
}

std::optional<PlayerId> parse_player_label(const std::string& label) {
    if (label.size() < 2 || (label[0] != 's' && label[0] != 'b')) {
        return std::nullopt;
    }
    int index = 0;
    for (std::size_t i = 1; i < label.size(); ++i) {
        if (label[i] < '0' || label[i] > '9') return std::nullopt;
        index = index * 10 + (label[i] - '0');
    }
    if (index < 1) return std::nullopt;
    return PlayerId{label[0] == 's' ? Side::seller : Side::buyer, index - 1};
}

std::strong_ordering compare_profiles(const ValuationProfile& a, const ValuationProfile& b) {
    if (auto c = a.sellers.size() <=> b.sellers.size(); c != 0) return c;
    if (auto c = a.buyers.size() <=> b.buyers.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.sellers.size(); ++i) {
        if (auto c = a.sellers[i] <=> b.sellers[i]; c != 0) return c;
    }
    for (std::size_t j = 0; j < a.buyers.size(); ++j) {
        if (auto c = a.buyers[j] <=> b.buyers[j]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

void validate_profile(const ValuationProfile& v, const MarketShape& shape) {
    if (static_cast<int>(v.sellers.size()) != shape.sellers ||
        static_cast<int>(v.buyers.size()) != shape.buyers) {
        throw dimension_error("profile has " + std::to_string(v.sellers.size()) + "+" +
                              std::to_string(v.buyers.size()) + " valuations, mechanism expects " +
                              std::to_string(shape.sellers) + "+" + std::to_string(shape.buyers));
    }
    const Rat zero(0);
    const Rat one(1);
    for (const Rat& s : v.sellers) {
        if (s < zero || s > one) throw dimension_error("seller valuation outside [0,1]");
    }
    for (const Rat& b : v.buyers) {
        if (b < zero || b > one) throw dimension_error("buyer valuation outside [0,1]");
    }
}

Outcome Outcome::no_trade(const MarketShape& shape) {
    Outcome out;
    out.seller_trades.assign(shape.sellers, 0);
    out.buyer_trades.assign(shape.buyers, 0);
    out.seller_receipts.assign(shape.sellers, Rat(0));
    out.buyer_payments.assign(shape.buyers, Rat(0));
    return out;
}

TraderSet trader_set(const Outcome& out) {
    TraderSet ts;
    for (std::size_t i = 0; i < out.seller_trades.size(); ++i) {
        if (out.seller_trades[i]) ts.sellers.push_back(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < out.buyer_trades.size(); ++j) {
        if (out.buyer_trades[j]) ts.buyers.push_back(static_cast<int>(j));
    }
    return ts;
}

std::string trader_set_label(const TraderSet& ts) {
    std::ostringstream os;
    os << "S{";
    for (std::size_t i = 0; i < ts.sellers.size(); ++i) {
        if (i) os << ",";
        os << ts.sellers[i] + 1;
    }
    os << "}B{";
    for (std::size_t j = 0; j < ts.buyers.size(); ++j) {
        if (j) os << ",";
        os << ts.buyers[j] + 1;
    }
    os << "}";
    return os.str();
}

Mechanism::Mechanism(std::string name, MarketShape shape, MechanismRule rule)
    : name_(std::move(name)), shape_(shape), rule_(std::move(rule)) {
    validate_shape(shape_);
}

Mechanism& Mechanism::set_params(std::vector<std::pair<std::string, std::string>> params) {
    params_ = std::move(params);
    return *this;
}

Mechanism& Mechanism::set_price_hints(std::vector<Rat> prices) {
    price_hints_ = std::move(prices);
    return *this;
}

Mechanism& Mechanism::set_rationing(RationingPriorities priorities) {
    rationing_ = std::move(priorities);
    return *this;
}

Outcome Mechanism::evaluate(const ValuationProfile& v) const {
    validate_profile(v, shape_);
    Outcome out = rule_(v);
    if (static_cast<int>(out.seller_trades.size()) != shape_.sellers ||
        static_cast<int>(out.buyer_trades.size()) != shape_.buyers ||
        static_cast<int>(out.seller_receipts.size()) != shape_.sellers ||
        static_cast<int>(out.buyer_payments.size()) != shape_.buyers) {
        throw dimension_error("mechanism '" + name_ + "' produced an outcome of the wrong shape");
    }
    for (auto bit : out.seller_trades) {
        if (bit > 1) throw dimension_error("allocation bit outside {0,1}");
    }
    for (auto bit : out.buyer_trades) {
        if (bit > 1) throw dimension_error("allocation bit outside {0,1}");
    }
    return out;
}

Rat seller_payoff(const Outcome& out, const ValuationProfile& v, int i) {
    if (i < 0 || i >= static_cast<int>(out.seller_trades.size())) {
        throw dimension_error("seller index out of range");
    }
    Rat u = out.seller_receipts[i];
    if (out.seller_trades[i]) u -= v.sellers.at(i);
    return u;
}

Rat buyer_payoff(const Outcome& out, const ValuationProfile& v, int j) {
    if (j < 0 || j >= static_cast<int>(out.buyer_trades.size())) {
        throw dimension_error("buyer index out of range");
    }
    Rat u = out.buyer_trades[j] ? v.buyers.at(j) : Rat(0);
    u -= out.buyer_payments[j];
    return u;
}

Rat player_payoff(const Outcome& out, const ValuationProfile& v, const PlayerId& id) {
    return id.side == Side::seller ? seller_payoff(out, v, id.index)
                                   : buyer_payoff(out, v, id.index);
}

Rat seller_payoff(const Mechanism& mech, const ValuationProfile& v, int i) {
    if (i < 0 || i >= mech.shape().sellers) {
        throw dimension_error("seller index out of range");
    }
    return seller_payoff(mech.evaluate(v), v, i);
}

Rat buyer_payoff(const Mechanism& mech, const ValuationProfile& v, int j) {
    if (j < 0 || j >= mech.shape().buyers) {
        throw dimension_error("buyer index out of range");
    }
    return buyer_payoff(mech.evaluate(v), v, j);
}

Rat player_payoff_with_true_value(const Outcome& out, const PlayerId& id, const Rat& true_value) {
    if (id.side == Side::seller) {
        Rat u = out.seller_receipts.at(id.index);
        if (out.seller_trades.at(id.index)) u -= true_value;
        return u;
    }
    Rat u = out.buyer_trades.at(id.index) ? true_value : Rat(0);
    u -= out.buyer_payments.at(id.index);
    return u;
}

const Rat& player_transfer(const Outcome& out, const PlayerId& id) {
    return id.side == Side::seller ? out.seller_receipts.at(id.index)
                                   : out.buyer_payments.at(id.index);
}

bool player_trades(const Outcome& out, const PlayerId& id) {
    return id.side == Side::seller ? out.seller_trades.at(id.index) != 0
                                   : out.buyer_trades.at(id.index) != 0;
}

}  // namespace damt
