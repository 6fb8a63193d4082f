#pragma once

// Straight-line reference evaluators used as independent oracles. They share
// only the value types with the library; every rule here is re-derived from
// scratch so that a defect in src/ cannot hide behind an identical defect in
// the tests.

#include <algorithm>
#include <numeric>
#include <vector>

#include "damt/core.hpp"

namespace oracle {

struct PricedTradeResult {
    int volume = 0;
    damt::Rat price;
    bool used_fallback = false;
    damt::Outcome outcome;
};

// Five-step evaluation of the priority-rationed order-statistic price rule:
// order the reports, find the largest feasible volume, price the remainder
// linearly, filter both sides by value and price, ration the longer side.
inline PricedTradeResult priced_trade(int m, int n, const std::vector<damt::Rat>& c,
                                      const std::vector<damt::Rat>& d,
                                      const std::vector<int>& seller_order,
                                      const std::vector<int>& buyer_order,
                                      const damt::Rat& fallback,
                                      const damt::ValuationProfile& v) {
    using damt::Rat;

    std::vector<int> sellers_sorted(m);
    std::iota(sellers_sorted.begin(), sellers_sorted.end(), 0);
    std::sort(sellers_sorted.begin(), sellers_sorted.end(), [&v](int a, int b) {
        if (v.sellers[a] != v.sellers[b]) return v.sellers[a] < v.sellers[b];
        return a < b;
    });
    std::vector<int> buyers_sorted(n);
    std::iota(buyers_sorted.begin(), buyers_sorted.end(), 0);
    std::sort(buyers_sorted.begin(), buyers_sorted.end(), [&v](int a, int b) {
        if (v.buyers[a] != v.buyers[b]) return v.buyers[a] > v.buyers[b];
        return a < b;
    });

    auto seller_stat = [&](int k) {
        if (k <= 0) return Rat(0);
        if (k >= m + 1) return Rat(1);
        return v.sellers[sellers_sorted[k - 1]];
    };
    auto buyer_stat = [&](int k) {
        if (k <= 0) return Rat(1);
        if (k >= n + 1) return Rat(0);
        return v.buyers[buyers_sorted[k - 1]];
    };

    PricedTradeResult result;
    for (int k = 1; k <= std::min(m, n); ++k) {
        if (seller_stat(k) <= buyer_stat(k)) result.volume = k;
    }

    if (result.volume == m && result.volume == n) {
        result.price = fallback;
        result.used_fallback = true;
    } else {
        Rat price(0);
        for (int l = 1; result.volume + l <= m; ++l) {
            price += c[l - 1] * seller_stat(result.volume + l);
        }
        for (int l = 1; result.volume + l <= n; ++l) {
            price += d[l - 1] * buyer_stat(result.volume + l);
        }
        result.price = price;
    }

    std::vector<int> seller_pool;
    for (int i = 0; i < m; ++i) {
        if (v.sellers[i] <= seller_stat(result.volume) && v.sellers[i] < result.price) {
            seller_pool.push_back(i);
        }
    }
    std::vector<int> buyer_pool;
    for (int j = 0; j < n; ++j) {
        if (v.buyers[j] >= buyer_stat(result.volume) && v.buyers[j] > result.price) {
            buyer_pool.push_back(j);
        }
    }

    const std::size_t trades = std::min(seller_pool.size(), buyer_pool.size());
    auto ration = [trades](const std::vector<int>& pool, const std::vector<int>& order) {
        std::vector<int> kept;
        for (int who : order) {
            if (kept.size() == trades) break;
            if (std::find(pool.begin(), pool.end(), who) != pool.end()) kept.push_back(who);
        }
        std::sort(kept.begin(), kept.end());
        return kept;
    };
    const std::vector<int> chosen_sellers = ration(seller_pool, seller_order);
    const std::vector<int> chosen_buyers = ration(buyer_pool, buyer_order);

    result.outcome = damt::Outcome::no_trade({m, n});
    for (int i : chosen_sellers) {
        result.outcome.seller_trades[i] = 1;
        result.outcome.seller_receipts[i] = result.price;
    }
    for (int j : chosen_buyers) {
        result.outcome.buyer_trades[j] = 1;
        result.outcome.buyer_payments[j] = result.price;
    }
    return result;
}

// Gain of one misreport under the rule above, evaluated at the true value.
inline damt::Rat priced_trade_gain(int m, int n, const std::vector<damt::Rat>& c,
                                   const std::vector<damt::Rat>& d,
                                   const std::vector<int>& seller_order,
                                   const std::vector<int>& buyer_order, const damt::Rat& fallback,
                                   const damt::ValuationProfile& truth,
                                   const damt::PlayerId& player, const damt::Rat& report) {
    const damt::Outcome honest =
        priced_trade(m, n, c, d, seller_order, buyer_order, fallback, truth).outcome;
    damt::ValuationProfile bent = truth;
    bent.value(player) = report;
    const damt::Outcome shaded =
        priced_trade(m, n, c, d, seller_order, buyer_order, fallback, bent).outcome;
    const damt::Rat true_value = truth.value(player);
    return damt::player_payoff_with_true_value(shaded, player, true_value) -
           damt::player_payoff_with_true_value(honest, player, true_value);
}

}  // namespace oracle
