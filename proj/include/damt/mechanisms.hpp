#pragma once

#include <functional>
#include <vector>

#include "damt/core.hpp"

namespace damt {

// Constant price posted in advance for one seller and one buyer; they trade
// at it exactly when both strictly profit (indifferent players stay out).
Mechanism make_bilateral_posted_price(const Rat& price);

// Two sellers and two buyers split into two fixed pairs, each pair running
// its own posted price independently of the other. Config kind "example1".
Mechanism make_paired_posted_price(const Rat& first_pair_price, const Rat& second_pair_price);

// One seller, two buyers, two posted prices with seller_price < buyer_price.
// On trade the seller receives seller_price, buyer 1 pays buyer_price and
// buyer 2 collects the spread without ever trading. Config kind "example2".
Mechanism make_spread_posted_price(const Rat& seller_price, const Rat& buyer_price);

// One seller, two buyers: the price is the lower of the two buyer reports
// and the higher-report buyer trades when the seller's report is strictly
// below the price (ties go to buyer 1). Config kind "example3".
Mechanism make_low_bid_price();

// One seller, two buyers, two tiers: buyer 1 trades at primary_price when
// strictly profitable for both sides, otherwise buyer 2 trades at
// secondary_price under the same test. Config kind "example4".
Mechanism make_two_tier_posted_price(const Rat& primary_price, const Rat& secondary_price);

struct TraderSetPrice {
    TraderSet traders;
    Rat price;
};

// One constant price per possible trader set. The selection rule picks
// which set (possibly none) is active at each profile; when absent, the
// default rule activates the first listed entry whose members all strictly
// profit at its price.
struct GeneralizedPostedPriceParams {
    std::vector<TraderSetPrice> entries;
    std::function<TraderSet(const ValuationProfile&)> selection;
};

Mechanism make_generalized_posted_price(const MarketShape& shape,
                                        GeneralizedPostedPriceParams params);

// Seller valuations ascending, buyer valuations descending, ties broken by
// original player index. Accessors honor the boundary conventions
// seller_stat(0)=0, seller_stat(m+1)=1, buyer_stat(0)=1, buyer_stat(n+1)=0.
struct OrderStatistics {
    std::vector<std::pair<Rat, int>> sorted_sellers;  // (value, original index), ascending
    std::vector<std::pair<Rat, int>> sorted_buyers;   // (value, original index), descending
    int tentative_volume = 0;  // largest k with seller_stat(k) <= buyer_stat(k)

    Rat seller_stat(int k) const;
    Rat buyer_stat(int k) const;
};

OrderStatistics compute_order_stats(const ValuationProfile& v);

// Price rule: a fixed nonnegative linear combination of the valuations left
// outside the tentative trade, with sum of coefficients at most one so the
// price stays in [0,1] for every realization.
struct LinearPriceParams {
    std::vector<Rat> seller_coeffs;   // one per seller, applied to seller stats above the volume
    std::vector<Rat> buyer_coeffs;    // one per buyer, applied to buyer stats below the volume
    std::vector<int> seller_priority; // rationing order, first entry trades first
    std::vector<int> buyer_priority;
    Rat fallback_price = Rat(1, 2);   // used only when every player is a tentative trader
};

struct LinearPriceTrace {
    OrderStatistics stats;
    Rat price;
    bool used_fallback = false;
    std::vector<int> eligible_sellers;  // value-eligible and strictly below the price
    std::vector<int> eligible_buyers;   // value-eligible and strictly above the price
    TraderSet selected;                 // after rationing the longer side
    Outcome outcome;
};

void validate_linear_price_params(const MarketShape& shape, const LinearPriceParams& params);

LinearPriceTrace linear_price_trace(const MarketShape& shape, const LinearPriceParams& params,
                                    const ValuationProfile& v);

Mechanism make_linear_price(const MarketShape& shape, LinearPriceParams params);

}  // namespace damt
