#include "damt/mechanisms.hpp"

#include <algorithm>
#include <set>

namespace damt {

namespace {

const Rat kZero(0);
const Rat kOne(1);

void require_price(const Rat& price, const char* what) {
    if (price < kZero || price > kOne) {
        throw config_error(std::string(what) + " must lie in [0,1], got " + price.str());
    }
}

void require_permutation(const std::vector<int>& order, int size, const char* what) {
    if (static_cast<int>(order.size()) != size) {
        throw config_error(std::string(what) + " must list each index exactly once");
    }
    std::vector<char> seen(size, 0);
    for (int idx : order) {
        if (idx < 0 || idx >= size || seen[idx]) {
            throw config_error(std::string(what) + " must be a permutation of 0.." +
                               std::to_string(size - 1));
        }
        seen[idx] = 1;
    }
}

}  // namespace

Mechanism make_bilateral_posted_price(const Rat& price) {
    require_price(price, "posted price");
    MarketShape shape{1, 1};
    Mechanism mech("bilateral_posted", shape, [price, shape](const ValuationProfile& v) {
        Outcome out = Outcome::no_trade(shape);
        if (v.sellers[0] < price && price < v.buyers[0]) {
            out.seller_trades[0] = 1;
            out.buyer_trades[0] = 1;
            out.seller_receipts[0] = price;
            out.buyer_payments[0] = price;
        }
        return out;
    });
    mech.set_params({{"pi", price.str()}});
    mech.set_price_hints({price});
    return mech;
}

Mechanism make_paired_posted_price(const Rat& first_pair_price, const Rat& second_pair_price) {
    require_price(first_pair_price, "pi1");
    require_price(second_pair_price, "pi2");
    MarketShape shape{2, 2};
    Rat prices[2] = {first_pair_price, second_pair_price};
    Mechanism mech("example1", shape, [prices, shape](const ValuationProfile& v) {
        Outcome out = Outcome::no_trade(shape);
        for (int pair = 0; pair < 2; ++pair) {
            if (v.sellers[pair] < prices[pair] && prices[pair] < v.buyers[pair]) {
                out.seller_trades[pair] = 1;
                out.buyer_trades[pair] = 1;
                out.seller_receipts[pair] = prices[pair];
                out.buyer_payments[pair] = prices[pair];
            }
        }
        return out;
    });
    mech.set_params({{"pi1", first_pair_price.str()}, {"pi2", second_pair_price.str()}});
    mech.set_price_hints({first_pair_price, second_pair_price});
    return mech;
}

Mechanism make_spread_posted_price(const Rat& seller_price, const Rat& buyer_price) {
    require_price(seller_price, "pi_s");
    require_price(buyer_price, "pi_b");
    if (!(seller_price < buyer_price)) {
        throw config_error("spread prices need pi_s < pi_b, got " + seller_price.str() +
                           " >= " + buyer_price.str());
    }
    MarketShape shape{1, 2};
    Mechanism mech("example2", shape, [seller_price, buyer_price, shape](const ValuationProfile& v) {
        Outcome out = Outcome::no_trade(shape);
        if (v.sellers[0] < seller_price && buyer_price < v.buyers[0]) {
            out.seller_trades[0] = 1;
            out.buyer_trades[0] = 1;
            out.seller_receipts[0] = seller_price;
            out.buyer_payments[0] = buyer_price;
            out.buyer_payments[1] = seller_price - buyer_price;  // buyer 2 collects the spread
        }
        return out;
    });
    mech.set_params({{"pi_s", seller_price.str()}, {"pi_b", buyer_price.str()}});
    mech.set_price_hints({seller_price, buyer_price});
    return mech;
}

Mechanism make_low_bid_price() {
    MarketShape shape{1, 2};
    Mechanism mech("example3", shape, [shape](const ValuationProfile& v) {
        Outcome out = Outcome::no_trade(shape);
        const int hi = v.buyers[0] >= v.buyers[1] ? 0 : 1;
        const int lo = 1 - hi;
        const Rat& price = v.buyers[lo];
        if (v.sellers[0] < price && price < v.buyers[hi]) {
            out.seller_trades[0] = 1;
            out.buyer_trades[hi] = 1;
            out.seller_receipts[0] = price;
            out.buyer_payments[hi] = price;
        }
        return out;
    });
    return mech;
}

Mechanism make_two_tier_posted_price(const Rat& primary_price, const Rat& secondary_price) {
    require_price(primary_price, "pi");
    require_price(secondary_price, "pi_prime");
    MarketShape shape{1, 2};
    Mechanism mech("example4", shape,
                   [primary_price, secondary_price, shape](const ValuationProfile& v) {
                       Outcome out = Outcome::no_trade(shape);
                       if (v.sellers[0] < primary_price && primary_price < v.buyers[0]) {
                           out.buyer_trades[0] = 1;
                           out.buyer_payments[0] = primary_price;
                       } else if (v.sellers[0] < secondary_price && secondary_price < v.buyers[1]) {
                           out.buyer_trades[1] = 1;
                           out.buyer_payments[1] = secondary_price;
                       }
                       if (out.buyer_trades[0] || out.buyer_trades[1]) {
                           out.seller_trades[0] = 1;
                           out.seller_receipts[0] = out.buyer_payments[0] + out.buyer_payments[1];
                       }
                       return out;
                   });
    mech.set_params({{"pi", primary_price.str()}, {"pi_prime", secondary_price.str()}});
    mech.set_price_hints({primary_price, secondary_price});
    return mech;
}

Mechanism make_generalized_posted_price(const MarketShape& shape,
                                        GeneralizedPostedPriceParams params) {
    validate_shape(shape);
    if (params.entries.empty()) {
        throw config_error("generalized posted price needs at least one trader-set entry");
    }
    std::set<TraderSet> seen;
    for (auto& entry : params.entries) {
        std::sort(entry.traders.sellers.begin(), entry.traders.sellers.end());
        std::sort(entry.traders.buyers.begin(), entry.traders.buyers.end());
        if (entry.traders.sellers.size() != entry.traders.buyers.size() ||
            entry.traders.sellers.empty()) {
            throw config_error("trader-set entry must pair equally many sellers and buyers");
        }
        auto distinct = [](const std::vector<int>& ids, int limit) {
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (ids[k] < 0 || ids[k] >= limit) return false;
                if (k > 0 && ids[k] == ids[k - 1]) return false;
            }
            return true;
        };
        if (!distinct(entry.traders.sellers, shape.sellers) ||
            !distinct(entry.traders.buyers, shape.buyers)) {
            throw config_error("trader-set entry has out-of-range or repeated player indices");
        }
        require_price(entry.price, "trader-set price");
        if (!seen.insert(entry.traders).second) {
            throw config_error("trader set listed twice: " + trader_set_label(entry.traders));
        }
    }

    auto entries = std::move(params.entries);
    auto selection = std::move(params.selection);
    std::vector<std::pair<std::string, std::string>> echo;
    std::vector<Rat> hints;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        echo.emplace_back("price[" + trader_set_label(entries[k].traders) + "]",
                          entries[k].price.str());
        hints.push_back(entries[k].price);
    }

    Mechanism mech("generalized_posted", shape,
                   [entries, selection, shape](const ValuationProfile& v) {
                       Outcome out = Outcome::no_trade(shape);
                       const TraderSetPrice* active = nullptr;
                       if (selection) {
                           TraderSet chosen = selection(v);
                           std::sort(chosen.sellers.begin(), chosen.sellers.end());
                           std::sort(chosen.buyers.begin(), chosen.buyers.end());
                           if (chosen.empty()) return out;
                           for (const auto& entry : entries) {
                               if (entry.traders == chosen) {
                                   active = &entry;
                                   break;
                               }
                           }
                           if (active == nullptr) {
                               throw config_error("selection rule returned a trader set with no "
                                                  "posted price: " +
                                                  trader_set_label(chosen));
                           }
                       } else {
                           for (const auto& entry : entries) {
                               bool feasible = true;
                               for (int i : entry.traders.sellers) {
                                   if (!(v.sellers[i] < entry.price)) {
                                       feasible = false;
                                       break;
                                   }
                               }
                               for (int j : entry.traders.buyers) {
                                   if (!feasible || !(v.buyers[j] > entry.price)) {
                                       feasible = false;
                                       break;
                                   }
                               }
                               if (feasible) {
                                   active = &entry;
                                   break;
                               }
                           }
                           if (active == nullptr) return out;
                       }
                       for (int i : active->traders.sellers) {
                           out.seller_trades[i] = 1;
                           out.seller_receipts[i] = active->price;
                       }
                       for (int j : active->traders.buyers) {
                           out.buyer_trades[j] = 1;
                           out.buyer_payments[j] = active->price;
                       }
                       return out;
                   });
    mech.set_params(std::move(echo));
    mech.set_price_hints(std::move(hints));
    return mech;
}

Rat OrderStatistics::seller_stat(int k) const {
    const int m = static_cast<int>(sorted_sellers.size());
    if (k < 0 || k > m + 1) {
        throw dimension_error("seller order statistic index out of range");
    }
    if (k == 0) return kZero;
    if (k == m + 1) return kOne;
    return sorted_sellers[k - 1].first;
}

Rat OrderStatistics::buyer_stat(int k) const {
    const int n = static_cast<int>(sorted_buyers.size());
    if (k < 0 || k > n + 1) {
        throw dimension_error("buyer order statistic index out of range");
    }
    if (k == 0) return kOne;
    if (k == n + 1) return kZero;
    return sorted_buyers[k - 1].first;
}

OrderStatistics compute_order_stats(const ValuationProfile& v) {
    OrderStatistics stats;
    stats.sorted_sellers.reserve(v.sellers.size());
    for (std::size_t i = 0; i < v.sellers.size(); ++i) {
        stats.sorted_sellers.emplace_back(v.sellers[i], static_cast<int>(i));
    }
    std::sort(stats.sorted_sellers.begin(), stats.sorted_sellers.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
              });
    stats.sorted_buyers.reserve(v.buyers.size());
    for (std::size_t j = 0; j < v.buyers.size(); ++j) {
        stats.sorted_buyers.emplace_back(v.buyers[j], static_cast<int>(j));
    }
    std::sort(stats.sorted_buyers.begin(), stats.sorted_buyers.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
              });

    const int limit = static_cast<int>(std::min(v.sellers.size(), v.buyers.size()));
    int volume = 0;
    for (int k = 1; k <= limit; ++k) {
        if (stats.seller_stat(k) <= stats.buyer_stat(k)) volume = k;
    }
    stats.tentative_volume = volume;
    return stats;
}

void validate_linear_price_params(const MarketShape& shape, const LinearPriceParams& params) {
    validate_shape(shape);
    if (static_cast<int>(params.seller_coeffs.size()) != shape.sellers ||
        static_cast<int>(params.buyer_coeffs.size()) != shape.buyers) {
        throw config_error("linear price needs one coefficient per seller and per buyer");
    }
    Rat total(0);
    for (const Rat& c : params.seller_coeffs) {
        if (c < kZero) throw config_error("linear price coefficients must be nonnegative");
        total += c;
    }
    for (const Rat& d : params.buyer_coeffs) {
        if (d < kZero) throw config_error("linear price coefficients must be nonnegative");
        total += d;
    }
    if (total > kOne) {
        throw config_error("linear price coefficients must sum to at most 1 so the price stays "
                           "in [0,1]; got " +
                           total.str());
    }
    require_permutation(params.seller_priority, shape.sellers, "seller rationing priority");
    require_permutation(params.buyer_priority, shape.buyers, "buyer rationing priority");
    require_price(params.fallback_price, "fallback price");
}

LinearPriceTrace linear_price_trace(const MarketShape& shape, const LinearPriceParams& params,
                                    const ValuationProfile& v) {
    LinearPriceTrace trace;
    trace.stats = compute_order_stats(v);
    const int volume = trace.stats.tentative_volume;
    const int m = shape.sellers;
    const int n = shape.buyers;

    // The price is a linear combination of the valuations left outside the
    // tentative trade. Only when no player is left on either side is there
    // nothing to combine, and the pre-specified fallback price applies.
    if (volume == m && volume == n) {
        trace.price = params.fallback_price;
        trace.used_fallback = true;
    } else {
        Rat price(0);
        for (int l = 1; l <= m - volume; ++l) {
            price += params.seller_coeffs[l - 1] * trace.stats.seller_stat(volume + l);
        }
        for (int l = 1; l <= n - volume; ++l) {
            price += params.buyer_coeffs[l - 1] * trace.stats.buyer_stat(volume + l);
        }
        trace.price = price;
    }

    const Rat seller_cut = trace.stats.seller_stat(volume);  // 0 when volume == 0
    const Rat buyer_cut = trace.stats.buyer_stat(volume);    // 1 when volume == 0
    for (int i = 0; i < m; ++i) {
        if (v.sellers[i] <= seller_cut && v.sellers[i] < trace.price) {
            trace.eligible_sellers.push_back(i);
        }
    }
    for (int j = 0; j < n; ++j) {
        if (v.buyers[j] >= buyer_cut && v.buyers[j] > trace.price) {
            trace.eligible_buyers.push_back(j);
        }
    }

    const std::size_t trades = std::min(trace.eligible_sellers.size(), trace.eligible_buyers.size());
    auto pick = [trades](const std::vector<int>& eligible, const std::vector<int>& priority) {
        std::vector<int> chosen;
        if (eligible.size() <= trades) {
            chosen = eligible;
        } else {
            for (int candidate : priority) {
                if (chosen.size() == trades) break;
                if (std::find(eligible.begin(), eligible.end(), candidate) != eligible.end()) {
                    chosen.push_back(candidate);
                }
            }
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    };
    trace.selected.sellers = pick(trace.eligible_sellers, params.seller_priority);
    trace.selected.buyers = pick(trace.eligible_buyers, params.buyer_priority);

    trace.outcome = Outcome::no_trade(shape);
    for (int i : trace.selected.sellers) {
        trace.outcome.seller_trades[i] = 1;
        trace.outcome.seller_receipts[i] = trace.price;
    }
    for (int j : trace.selected.buyers) {
        trace.outcome.buyer_trades[j] = 1;
        trace.outcome.buyer_payments[j] = trace.price;
    }
    return trace;
}

Mechanism make_linear_price(const MarketShape& shape, LinearPriceParams params) {
    validate_linear_price_params(shape, params);

    std::vector<std::pair<std::string, std::string>> echo;
    auto list = [](const auto& items, auto&& stringify) {
        std::string text = "[";
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k) text += ",";
            text += stringify(items[k]);
        }
        return text + "]";
    };
    echo.emplace_back("c", list(params.seller_coeffs, [](const Rat& r) { return r.str(); }));
    echo.emplace_back("d", list(params.buyer_coeffs, [](const Rat& r) { return r.str(); }));
    echo.emplace_back("sigma", list(params.seller_priority, [](int i) { return std::to_string(i); }));
    echo.emplace_back("beta", list(params.buyer_priority, [](int i) { return std::to_string(i); }));
    echo.emplace_back("fallback_price", params.fallback_price.str());

    RationingPriorities priorities{params.seller_priority, params.buyer_priority};
    Rat fallback = params.fallback_price;
    LinearPriceParams captured = params;

    Mechanism mech("linear_price", shape, [shape, captured](const ValuationProfile& v) {
        return linear_price_trace(shape, captured, v).outcome;
    });
    mech.set_params(std::move(echo));
    mech.set_price_hints({fallback});
    mech.set_rationing(std::move(priorities));
    return mech;
}

}  // namespace damt
