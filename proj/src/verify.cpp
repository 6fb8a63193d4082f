#include "damt/verify.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <thread>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace damt {

namespace {

const Rat kZero(0);
const Rat kOne(1);

void require_same_shape(const Mechanism& mech, const Grid& grid) {
    if (!(mech.shape() == grid.shape())) {
        throw dimension_error("grid shape does not match mechanism shape");
    }
}

int resolve_jobs(int requested) {
#ifdef _OPENMP
    if (requested <= 0) return std::max(1, omp_get_max_threads());
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

std::pair<std::uint64_t, std::uint64_t> chunk_bounds(std::uint64_t count, int chunks, int c) {
    const std::uint64_t base = count / chunks;
    const std::uint64_t rem = count % chunks;
    const std::uint64_t extra = std::min<std::uint64_t>(c, rem);
    const std::uint64_t lo = base * c + extra;
    const std::uint64_t hi = lo + base + (static_cast<std::uint64_t>(c) < rem ? 1 : 0);
    return {lo, hi};
}

template <typename T>
struct Sink {
    std::vector<T> items;
    std::uint64_t total = 0;
    std::size_t cap = static_cast<std::size_t>(-1);

    void emit(T&& item) {
        ++total;
        if (items.size() < cap) items.push_back(std::move(item));
    }
};

// Runs per_profile over every grid profile in ascending (lexicographic)
// index order. jobs <= 1 takes the plain serial path, kept as the reference
// implementation; otherwise the index range is split into `jobs` contiguous
// chunks scanned by an OpenMP team and merged back in chunk order, so the
// emitted sequence is identical to the serial one.
template <typename T, typename PerProfile>
std::pair<std::vector<T>, std::uint64_t> scan_grid(const Grid& grid, int jobs,
                                                   std::size_t chunk_cap,
                                                   PerProfile&& per_profile) {
    const std::uint64_t count = grid.profile_count();
    jobs = resolve_jobs(jobs);
    if (jobs > 1 && static_cast<std::uint64_t>(jobs) > count) {
        jobs = static_cast<int>(std::max<std::uint64_t>(1, count));
    }

    if (jobs <= 1) {
        Sink<T> sink;
        sink.cap = chunk_cap;
        ValuationProfile scratch;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            grid.write_profile(idx, scratch);
            per_profile(idx, scratch, sink);
        }
        return {std::move(sink.items), sink.total};
    }

#ifdef _OPENMP
    std::vector<Sink<T>> sinks(jobs);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static, 1) num_threads(jobs)
    for (int c = 0; c < jobs; ++c) {
        try {
            Sink<T>& sink = sinks[c];
            sink.cap = chunk_cap;
            auto [lo, hi] = chunk_bounds(count, jobs, c);
            ValuationProfile scratch;
            for (std::uint64_t idx = lo; idx < hi; ++idx) {
                grid.write_profile(idx, scratch);
                per_profile(idx, scratch, sink);
            }
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<T> items;
    std::uint64_t total = 0;
    for (auto& sink : sinks) {
        total += sink.total;
        for (auto& item : sink.items) items.push_back(std::move(item));
    }
    return {std::move(items), total};
#else
    Sink<T> sink;
    sink.cap = chunk_cap;
    ValuationProfile scratch;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        grid.write_profile(idx, scratch);
        per_profile(idx, scratch, sink);
    }
    return {std::move(sink.items), sink.total};
#endif
}

// ordered_emission means per_profile emits in canonical order already, so
// chunks may cap their local lists without losing any of the first
// max_violations witnesses. Player-major checkers emit out of order and
// keep everything until the final sort.
template <typename PerProfile>
CheckResult run_check(Property property, const Grid& grid, const CheckOptions& options,
                      bool ordered_emission, PerProfile&& per_profile) {
    const std::size_t chunk_cap =
        ordered_emission ? options.max_violations : static_cast<std::size_t>(-1);
    auto [items, total] =
        scan_grid<Violation>(grid, options.jobs, chunk_cap, std::forward<PerProfile>(per_profile));
    std::stable_sort(items.begin(), items.end(), violation_less);
    if (items.size() > options.max_violations) items.resize(options.max_violations);
    CheckResult result;
    result.property = property;
    result.total = total;
    result.truncated = total > items.size();
    result.violations = std::move(items);
    return result;
}

std::vector<PlayerId> all_players(const MarketShape& shape) {
    std::vector<PlayerId> ids;
    ids.reserve(shape.players());
    for (int i = 0; i < shape.sellers; ++i) ids.push_back({Side::seller, i});
    for (int j = 0; j < shape.buyers; ++j) ids.push_back({Side::buyer, j});
    return ids;
}

// Common transfer of all trading players, when they share one.
std::optional<Rat> uniform_trade_price(const Outcome& out, const TraderSet& ts) {
    std::optional<Rat> price;
    for (int i : ts.sellers) {
        if (!price) {
            price = out.seller_receipts[i];
        } else if (*price != out.seller_receipts[i]) {
            return std::nullopt;
        }
    }
    for (int j : ts.buyers) {
        if (!price) {
            price = out.buyer_payments[j];
        } else if (*price != out.buyer_payments[j]) {
            return std::nullopt;
        }
    }
    return price;
}

// Per-side uniform transfers; first = sellers, second = buyers. Empty sides
// stay nullopt; a side with mixed transfers makes the whole result nullopt.
std::optional<std::pair<std::optional<Rat>, std::optional<Rat>>> side_prices(
    const Outcome& out, const TraderSet& ts) {
    std::pair<std::optional<Rat>, std::optional<Rat>> prices;
    for (int i : ts.sellers) {
        if (!prices.first) {
            prices.first = out.seller_receipts[i];
        } else if (*prices.first != out.seller_receipts[i]) {
            return std::nullopt;
        }
    }
    for (int j : ts.buyers) {
        if (!prices.second) {
            prices.second = out.buyer_payments[j];
        } else if (*prices.second != out.buyer_payments[j]) {
            return std::nullopt;
        }
    }
    return prices;
}

}  // namespace

CheckResult check_ic(const Mechanism& mech, const Grid& grid, const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech, &grid](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome truth = mech.evaluate(v);
        ValuationProfile w = v;
        for (const PlayerId id : all_players(mech.shape())) {
            const Rat true_value = v.value(id);
            const Rat truthful = player_payoff(truth, v, id);
            for (const Rat& report : grid.axis(id)) {
                if (report == true_value) continue;
                w.value(id) = report;
                const Outcome alt = mech.evaluate(w);
                const Rat deviant = player_payoff_with_true_value(alt, id, true_value);
                if (deviant > truthful) {
                    Violation viol;
                    viol.property = Property::ic;
                    viol.profile = v;
                    viol.player = id;
                    viol.deviation = report;
                    viol.detail = {{"truthful_payoff", truthful}, {"deviation_payoff", deviant}};
                    sink.emit(std::move(viol));
                }
            }
            w.value(id) = true_value;
        }
    };
    return run_check(Property::ic, grid, options, true, per_profile);
}

CheckResult check_ir(const Mechanism& mech, const Grid& grid, const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome out = mech.evaluate(v);
        for (const PlayerId id : all_players(mech.shape())) {
            const Rat payoff = player_payoff(out, v, id);
            if (payoff < kZero) {
                Violation viol;
                viol.property = Property::ir;
                viol.profile = v;
                viol.player = id;
                viol.detail = {{"payoff", payoff}};
                sink.emit(std::move(viol));
            }
        }
    };
    return run_check(Property::ir, grid, options, true, per_profile);
}

CheckResult check_bb(const Mechanism& mech, const Grid& grid, const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome out = mech.evaluate(v);
        Rat receipts(0);
        Rat payments(0);
        for (const Rat& x : out.seller_receipts) receipts += x;
        for (const Rat& y : out.buyer_payments) payments += y;
        if (receipts != payments) {
            Violation viol;
            viol.property = Property::bb;
            viol.profile = v;
            viol.detail = {{"seller_total", receipts}, {"buyer_total", payments}};
            sink.emit(std::move(viol));
        }
    };
    return run_check(Property::bb, grid, options, true, per_profile);
}

CheckResult check_nw(const Mechanism& mech, const Grid& grid, const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome out = mech.evaluate(v);
        int sold = 0;
        int bought = 0;
        for (auto bit : out.seller_trades) sold += bit;
        for (auto bit : out.buyer_trades) bought += bit;
        if (sold != bought) {
            Violation viol;
            viol.property = Property::nw;
            viol.profile = v;
            viol.detail = {{"sellers_trading", Rat(sold)}, {"buyers_trading", Rat(bought)}};
            sink.emit(std::move(viol));
        }
    };
    return run_check(Property::nw, grid, options, true, per_profile);
}

CheckResult check_common_price(const Mechanism& mech, const Grid& grid,
                               const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome out = mech.evaluate(v);
        const TraderSet ts = trader_set(out);
        auto audit_side = [&](const std::vector<int>& traders, const std::vector<Rat>& transfers,
                              Side side, const char* tag) {
            if (traders.size() < 2) return;
            const int first = traders.front();
            for (std::size_t k = 1; k < traders.size(); ++k) {
                const int other = traders[k];
                if (transfers[other] != transfers[first]) {
                    Violation viol;
                    viol.property = Property::common_price;
                    viol.profile = v;
                    viol.player = PlayerId{side, first};
                    viol.note = tag;
                    viol.detail = {{"player_a", Rat(first)},
                                   {"player_b", Rat(other)},
                                   {"transfer_a", transfers[first]},
                                   {"transfer_b", transfers[other]}};
                    sink.emit(std::move(viol));
                    return;
                }
            }
        };
        audit_side(ts.sellers, out.seller_receipts, Side::seller, "sellers");
        audit_side(ts.buyers, out.buyer_payments, Side::buyer, "buyers");
    };
    return run_check(Property::common_price, grid, options, true, per_profile);
}

CheckResult check_worst_type_zero(const Mechanism& mech, const Grid& grid,
                                  const CheckOptions& options) {
    require_same_shape(mech, grid);
    if (!grid.has_worst_type_points()) {
        throw config_error("worst-type check needs valuation 1 on every seller axis and 0 on "
                           "every buyer axis");
    }
    auto per_profile = [&mech, &grid](std::uint64_t, const ValuationProfile& v, auto& sink) {
        // Visit each opponent sub-profile once: act only when the player's
        // own coordinate sits at the bottom of its axis.
        for (const PlayerId id : all_players(mech.shape())) {
            if (v.value(id) != grid.axis(id).front()) continue;
            ValuationProfile w = v;
            w.value(id) = id.side == Side::seller ? kOne : kZero;
            const Outcome out = mech.evaluate(w);
            const Rat payoff = player_payoff(out, w, id);
            if (payoff != kZero) {
                Violation viol;
                viol.property = Property::worst_type_zero;
                viol.profile = w;
                viol.player = id;
                viol.detail = {{"payoff", payoff}, {"transfer", player_transfer(out, id)}};
                sink.emit(std::move(viol));
            }
        }
    };
    return run_check(Property::worst_type_zero, grid, options, false, per_profile);
}

CheckResult check_nonbossy(const Mechanism& mech, const Grid& grid, const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech, &grid](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome base = mech.evaluate(v);
        ValuationProfile w = v;
        for (const PlayerId id : all_players(mech.shape())) {
            const bool own_trade = player_trades(base, id);
            const Rat own_transfer = player_transfer(base, id);
            for (const Rat& report : grid.axis(id)) {
                if (report == v.value(id)) continue;
                w.value(id) = report;
                const Outcome alt = mech.evaluate(w);
                if (player_trades(alt, id) != own_trade ||
                    player_transfer(alt, id) != own_transfer) {
                    continue;  // the player moved their own terms; not bossiness
                }
                if (alt.seller_receipts == base.seller_receipts &&
                    alt.buyer_payments == base.buyer_payments) {
                    continue;
                }
                // one witness per player whose transfer the deviator moved
                std::vector<Violation> batch;
                for (const PlayerId other : all_players(mech.shape())) {
                    if (other == id) continue;
                    if (player_transfer(base, other) == player_transfer(alt, other)) continue;
                    Violation viol;
                    viol.property = Property::nonbossy;
                    viol.profile = v;
                    viol.player = id;
                    viol.deviation = report;
                    viol.note = player_label(other);
                    viol.detail = {{"own_allocation", Rat(own_trade ? 1 : 0)},
                                   {"own_transfer", own_transfer},
                                   {"before", player_transfer(base, other)},
                                   {"after", player_transfer(alt, other)}};
                    batch.push_back(std::move(viol));
                }
                std::sort(batch.begin(), batch.end(), violation_less);
                for (Violation& viol : batch) sink.emit(std::move(viol));
            }
            w.value(id) = v.value(id);
        }
    };
    return run_check(Property::nonbossy, grid, options, true, per_profile);
}

CheckResult check_allocation_monotone(const Mechanism& mech, const Grid& grid,
                                      const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech, &grid](std::uint64_t, const ValuationProfile& v, auto& sink) {
        for (const PlayerId id : all_players(mech.shape())) {
            const auto& axis = grid.axis(id);
            if (v.value(id) != axis.front()) continue;
            ValuationProfile w = v;
            bool prev_trade = false;
            for (std::size_t k = 0; k < axis.size(); ++k) {
                w.value(id) = axis[k];
                const bool trade = player_trades(mech.evaluate(w), id);
                if (k > 0) {
                    const bool broken =
                        id.side == Side::seller ? (!prev_trade && trade) : (prev_trade && !trade);
                    if (broken) {
                        Violation viol;
                        viol.property = Property::allocation_monotone;
                        viol.profile = w;
                        viol.player = id;
                        viol.deviation = axis[k - 1];
                        viol.note = id.side == Side::seller ? "allocation rises in own value"
                                                            : "allocation falls in own value";
                        viol.detail = {{"allocation_at_deviation", Rat(prev_trade ? 1 : 0)},
                                       {"allocation_at_profile", Rat(trade ? 1 : 0)}};
                        sink.emit(std::move(viol));
                    }
                }
                prev_trade = trade;
            }
        }
    };
    return run_check(Property::allocation_monotone, grid, options, false, per_profile);
}

CheckResult check_payoff_envelope(const Mechanism& mech, const Grid& grid,
                                  std::optional<Rat> tolerance, const CheckOptions& options) {
    require_same_shape(mech, grid);
    const Rat step = grid.max_step();
    const Rat tol = tolerance.value_or(step);
    if (tol < step) {
        throw config_error("envelope tolerance " + tol.str() + " is below the grid step " +
                           step.str());
    }
    auto per_profile = [&mech, &grid, tol](std::uint64_t, const ValuationProfile& v, auto& sink) {
        ValuationProfile w = v;
        for (const PlayerId id : all_players(mech.shape())) {
            const auto& axis = grid.axis(id);
            const Rat own = v.value(id);
            const Rat payoff = player_payoff(mech.evaluate(v), v, id);

            w.value(id) = id.side == Side::seller ? kOne : kZero;
            const Rat worst = player_payoff(mech.evaluate(w), w, id);

            Rat integral(0);
            if (id.side == Side::seller) {
                // left Riemann sum of the allocation over [own, 1]
                for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
                    if (axis[k] < own) continue;
                    w.value(id) = axis[k];
                    if (player_trades(mech.evaluate(w), id)) {
                        integral += axis[k + 1] - axis[k];
                    }
                }
                if (axis.back() < kOne) {
                    w.value(id) = axis.back();
                    if (player_trades(mech.evaluate(w), id)) {
                        integral += kOne - axis.back();
                    }
                }
            } else {
                // right Riemann sum of the allocation over [0, own]
                if (axis.front() > kZero) {
                    w.value(id) = axis.front();
                    if (player_trades(mech.evaluate(w), id)) {
                        integral += axis.front();
                    }
                }
                for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
                    if (axis[k + 1] > own) break;
                    w.value(id) = axis[k + 1];
                    if (player_trades(mech.evaluate(w), id)) {
                        integral += axis[k + 1] - axis[k];
                    }
                }
            }
            w.value(id) = own;

            const Rat gap = abs(payoff - integral - worst);
            if (gap > tol) {
                Violation viol;
                viol.property = Property::payoff_envelope;
                viol.profile = v;
                viol.player = id;
                viol.detail = {{"payoff", payoff},
                               {"integral_estimate", integral},
                               {"worst_type_payoff", worst},
                               {"tolerance", tol}};
                sink.emit(std::move(viol));
            }
        }
    };
    return run_check(Property::payoff_envelope, grid, options, true, per_profile);
}

CheckResult check_trade_structure(const Mechanism& mech, const Grid& grid,
                                  const CheckOptions& options) {
    require_same_shape(mech, grid);
    auto per_profile = [&mech, &grid](std::uint64_t, const ValuationProfile& v, auto& sink) {
        const Outcome out = mech.evaluate(v);
        const TraderSet ts = trader_set(out);
        if (ts.empty()) return;

        if (ts.sellers.size() != ts.buyers.size()) {
            Violation viol;
            viol.property = Property::trade_structure;
            viol.profile = v;
            viol.note = "volume_mismatch";
            viol.detail = {{"sellers_trading", Rat(static_cast<std::int64_t>(ts.sellers.size()))},
                           {"buyers_trading", Rat(static_cast<std::int64_t>(ts.buyers.size()))}};
            sink.emit(std::move(viol));
        }

        const std::optional<Rat> price = uniform_trade_price(out, ts);
        if (!price) {
            // exhibit one mismatching pair of trader transfers
            std::vector<std::pair<PlayerId, Rat>> transfers;
            for (int i : ts.sellers) transfers.push_back({{Side::seller, i}, out.seller_receipts[i]});
            for (int j : ts.buyers) transfers.push_back({{Side::buyer, j}, out.buyer_payments[j]});
            for (std::size_t k = 1; k < transfers.size(); ++k) {
                if (transfers[k].second != transfers[0].second) {
                    Violation viol;
                    viol.property = Property::trade_structure;
                    viol.profile = v;
                    viol.player = transfers[k].first;
                    viol.note = "no_common_price";
                    viol.detail = {{"transfer_a", transfers[0].second},
                                   {"transfer_b", transfers[k].second}};
                    sink.emit(std::move(viol));
                    break;
                }
            }
        }

        for (const PlayerId id : all_players(mech.shape())) {
            if (player_trades(out, id)) continue;
            const Rat transfer = player_transfer(out, id);
            if (transfer != kZero) {
                Violation viol;
                viol.property = Property::trade_structure;
                viol.profile = v;
                viol.player = id;
                viol.note = "bystander_transfer";
                viol.detail = {{"transfer", transfer}};
                sink.emit(std::move(viol));
            }
        }

        if (!price) return;  // the remaining clauses need a well-defined price

        for (int i : ts.sellers) {
            if (v.sellers[i] > *price) {
                Violation viol;
                viol.property = Property::trade_structure;
                viol.profile = v;
                viol.player = PlayerId{Side::seller, i};
                viol.note = "price_bound";
                viol.detail = {{"price", *price}, {"valuation", v.sellers[i]}};
                sink.emit(std::move(viol));
            }
        }
        for (int j : ts.buyers) {
            if (v.buyers[j] < *price) {
                Violation viol;
                viol.property = Property::trade_structure;
                viol.profile = v;
                viol.player = PlayerId{Side::buyer, j};
                viol.note = "price_bound";
                viol.detail = {{"price", *price}, {"valuation", v.buyers[j]}};
                sink.emit(std::move(viol));
            }
        }

        // A trader's own valuation must not move the price while the trader
        // set stays put.
        ValuationProfile w = v;
        std::vector<PlayerId> traders;
        for (int i : ts.sellers) traders.push_back({Side::seller, i});
        for (int j : ts.buyers) traders.push_back({Side::buyer, j});
        for (const PlayerId id : traders) {
            for (const Rat& report : grid.axis(id)) {
                if (report == v.value(id)) continue;
                w.value(id) = report;
                const Outcome alt = mech.evaluate(w);
                if (trader_set(alt) != ts) continue;
                const std::optional<Rat> alt_price = uniform_trade_price(alt, ts);
                if (alt_price && *alt_price != *price) {
                    Violation viol;
                    viol.property = Property::trade_structure;
                    viol.profile = v;
                    viol.player = id;
                    viol.deviation = report;
                    viol.note = "trader_value_moves_price";
                    viol.detail = {{"price", *price}, {"perturbed_price", *alt_price}};
                    sink.emit(std::move(viol));
                }
            }
            w.value(id) = v.value(id);
        }
    };
    return run_check(Property::trade_structure, grid, options, false, per_profile);
}

CheckResult check_set_price_constancy(const Mechanism& mech, const Grid& grid,
                                      const CheckOptions& options) {
    require_same_shape(mech, grid);
    using PriceKey = std::pair<std::optional<Rat>, std::optional<Rat>>;
    using SetMap = std::map<TraderSet, std::map<PriceKey, std::uint64_t>>;

    auto scan_range = [&mech, &grid](std::uint64_t lo, std::uint64_t hi, SetMap& seen) {
        ValuationProfile scratch;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            grid.write_profile(idx, scratch);
            const Outcome out = mech.evaluate(scratch);
            const TraderSet ts = trader_set(out);
            if (ts.empty()) continue;
            const auto prices = side_prices(out, ts);
            if (!prices) continue;  // mixed transfers inside a side; the common-price audit owns it
            auto [it, inserted] = seen[ts].try_emplace(*prices, idx);
            if (!inserted) it->second = std::min(it->second, idx);
        }
    };

    const std::uint64_t count = grid.profile_count();
    SetMap seen;
    int jobs = resolve_jobs(options.jobs);
    if (jobs > 1 && static_cast<std::uint64_t>(jobs) > count) {
        jobs = static_cast<int>(std::max<std::uint64_t>(1, count));
    }
#ifdef _OPENMP
    if (jobs > 1) {
        std::vector<SetMap> partial(jobs);
        std::exception_ptr failure;
#pragma omp parallel for schedule(static, 1) num_threads(jobs)
        for (int c = 0; c < jobs; ++c) {
            try {
                auto [lo, hi] = chunk_bounds(count, jobs, c);
                scan_range(lo, hi, partial[c]);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (const auto& part : partial) {
            for (const auto& [ts, prices] : part) {
                for (const auto& [key, idx] : prices) {
                    auto [it, inserted] = seen[ts].try_emplace(key, idx);
                    if (!inserted) it->second = std::min(it->second, idx);
                }
            }
        }
    } else {
        scan_range(0, count, seen);
    }
#else
    scan_range(0, count, seen);
#endif

    std::vector<Violation> violations;
    std::uint64_t total = 0;
    for (const auto& [ts, prices] : seen) {
        if (prices.size() < 2) continue;
        auto base = std::min_element(prices.begin(), prices.end(), [](const auto& a, const auto& b) {
            return a.second < b.second;
        });
        const ValuationProfile base_profile = grid.profile_at(base->second);
        for (const auto& [key, idx] : prices) {
            if (key == base->first) continue;
            ++total;
            Violation viol;
            viol.property = Property::set_price_constancy;
            viol.profile = base_profile;
            viol.alt_profile = grid.profile_at(idx);
            viol.note = trader_set_label(ts);
            if (base->first.first) viol.detail.emplace_back("seller_price_a", *base->first.first);
            if (base->first.second) viol.detail.emplace_back("buyer_price_a", *base->first.second);
            if (key.first) viol.detail.emplace_back("seller_price_b", *key.first);
            if (key.second) viol.detail.emplace_back("buyer_price_b", *key.second);
            violations.push_back(std::move(viol));
        }
    }
    std::stable_sort(violations.begin(), violations.end(), violation_less);
    if (violations.size() > options.max_violations) violations.resize(options.max_violations);

    CheckResult result;
    result.property = Property::set_price_constancy;
    result.total = total;
    result.truncated = total > violations.size();
    result.violations = std::move(violations);
    return result;
}

CheckResult check_value_respecting(const Mechanism& mech, const Grid& grid,
                                   const CheckOptions& options) {
    require_same_shape(mech, grid);
    const auto& rationing = mech.rationing();
    auto ranks_before = [&rationing](Side side, int trader, int bystander) {
        if (!rationing) return false;
        const auto& order = side == Side::seller ? rationing->sellers : rationing->buyers;
        for (int idx : order) {
            if (idx == trader) return true;
            if (idx == bystander) return false;
        }
        return false;
    };

    auto per_profile = [&mech, &ranks_before](std::uint64_t, const ValuationProfile& v,
                                              auto& sink) {
        const Outcome out = mech.evaluate(v);
        const TraderSet ts = trader_set(out);
        if (ts.empty()) return;
        const std::optional<Rat> price = uniform_trade_price(out, ts);
        if (!price) return;  // no single price to test exclusion against

        const MarketShape shape = v.shape();
        for (int i = 0; i < shape.sellers; ++i) {
            if (out.seller_trades[i]) continue;
            if (v.sellers[i] >= *price) continue;  // priced out
            for (int t : ts.sellers) {
                if (!(v.sellers[i] < v.sellers[t])) continue;
                if (ranks_before(Side::seller, t, i)) continue;
                Violation viol;
                viol.property = Property::value_respecting;
                viol.profile = v;
                viol.player = PlayerId{Side::seller, i};
                viol.note = player_label({Side::seller, t});
                viol.detail = {{"nontrader_value", v.sellers[i]},
                               {"trader_value", v.sellers[t]},
                               {"price", *price}};
                sink.emit(std::move(viol));
                break;
            }
        }
        for (int j = 0; j < shape.buyers; ++j) {
            if (out.buyer_trades[j]) continue;
            if (v.buyers[j] <= *price) continue;  // priced out
            for (int t : ts.buyers) {
                if (!(v.buyers[j] > v.buyers[t])) continue;
                if (ranks_before(Side::buyer, t, j)) continue;
                Violation viol;
                viol.property = Property::value_respecting;
                viol.profile = v;
                viol.player = PlayerId{Side::buyer, j};
                viol.note = player_label({Side::buyer, t});
                viol.detail = {{"nontrader_value", v.buyers[j]},
                               {"trader_value", v.buyers[t]},
                               {"price", *price}};
                sink.emit(std::move(viol));
                break;
            }
        }
    };
    return run_check(Property::value_respecting, grid, options, true, per_profile);
}

ThresholdExtraction extract_thresholds(const Mechanism& mech, const Grid& grid) {
    require_same_shape(mech, grid);
    ThresholdExtraction result;

    for (const PlayerId id : all_players(mech.shape())) {
        const auto& axis = grid.axis(id);
        // iterate opponent sub-profiles: all profiles with own value at the
        // axis bottom
        const std::uint64_t count = grid.profile_count();
        ValuationProfile v;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            grid.write_profile(idx, v);
            if (v.value(id) != axis.front()) continue;

            std::vector<bool> trades(axis.size());
            ValuationProfile w = v;
            for (std::size_t k = 0; k < axis.size(); ++k) {
                w.value(id) = axis[k];
                trades[k] = player_trades(mech.evaluate(w), id);
            }

            bool monotone = true;
            for (std::size_t k = 1; k < axis.size(); ++k) {
                const bool broken = id.side == Side::seller ? (!trades[k - 1] && trades[k])
                                                            : (trades[k - 1] && !trades[k]);
                if (broken) {
                    monotone = false;
                    w.value(id) = axis[k];
                    Violation viol;
                    viol.property = Property::allocation_monotone;
                    viol.profile = w;
                    viol.player = id;
                    viol.deviation = axis[k - 1];
                    viol.detail = {{"allocation_at_deviation", Rat(trades[k - 1] ? 1 : 0)},
                                   {"allocation_at_profile", Rat(trades[k] ? 1 : 0)}};
                    result.monotonicity_violations.push_back(std::move(viol));
                    break;
                }
            }
            if (!monotone) continue;

            Threshold th;
            th.player = id;
            if (id.side == Side::seller) {
                // trades on a prefix of the axis
                std::size_t last_trade = axis.size();
                for (std::size_t k = 0; k < axis.size(); ++k) {
                    if (trades[k]) last_trade = k;
                }
                if (last_trade == axis.size()) {
                    th.low = th.high = th.value = kZero;  // never trades
                } else if (last_trade + 1 == axis.size()) {
                    th.low = th.high = th.value = kOne;  // trades even at the top
                } else {
                    th.low = axis[last_trade];
                    th.high = axis[last_trade + 1];
                    th.value = (th.low + th.high) * Rat(1, 2);
                }
            } else {
                // trades on a suffix of the axis
                std::size_t first_trade = axis.size();
                for (std::size_t k = axis.size(); k-- > 0;) {
                    if (trades[k]) first_trade = k;
                }
                if (first_trade == axis.size()) {
                    th.low = th.high = th.value = kOne;  // never trades
                } else if (first_trade == 0) {
                    th.low = th.high = th.value = kZero;  // trades even at the bottom
                } else {
                    th.low = axis[first_trade - 1];
                    th.high = axis[first_trade];
                    th.value = (th.low + th.high) * Rat(1, 2);
                }
            }
            th.context = v;
            th.context.value(id) = th.value;
            result.thresholds.push_back(std::move(th));
        }
    }

    if (!result.monotonicity_violations.empty()) {
        result.thresholds.clear();
        std::stable_sort(result.monotonicity_violations.begin(),
                         result.monotonicity_violations.end(), violation_less);
    }
    return result;
}

CheckResult run_property_check(Property property, const Mechanism& mech, const Grid& grid,
                               const CheckOptions& options,
                               std::optional<Rat> envelope_tolerance) {
    switch (property) {
        case Property::ic: return check_ic(mech, grid, options);
        case Property::ir: return check_ir(mech, grid, options);
        case Property::bb: return check_bb(mech, grid, options);
        case Property::nw: return check_nw(mech, grid, options);
        case Property::common_price: return check_common_price(mech, grid, options);
        case Property::worst_type_zero: return check_worst_type_zero(mech, grid, options);
        case Property::nonbossy: return check_nonbossy(mech, grid, options);
        case Property::allocation_monotone: return check_allocation_monotone(mech, grid, options);
        case Property::payoff_envelope:
            return check_payoff_envelope(mech, grid, envelope_tolerance, options);
        case Property::trade_structure: return check_trade_structure(mech, grid, options);
        case Property::set_price_constancy: return check_set_price_constancy(mech, grid, options);
        case Property::value_respecting: return check_value_respecting(mech, grid, options);
    }
    throw config_error("unknown property");
}

bool replay_violation(const Mechanism& mech, const Violation& viol) {
    auto find_detail = [&viol](const std::string& key) -> std::optional<Rat> {
        for (const auto& [k, value] : viol.detail) {
            if (k == key) return value;
        }
        return std::nullopt;
    };

    try {
        switch (viol.property) {
            case Property::ic: {
                if (!viol.player || !viol.deviation) return false;
                const Rat truthful = player_payoff(mech.evaluate(viol.profile), viol.profile,
                                                   *viol.player);
                ValuationProfile w = viol.profile;
                w.value(*viol.player) = *viol.deviation;
                const Rat deviant = player_payoff_with_true_value(
                    mech.evaluate(w), *viol.player, viol.profile.value(*viol.player));
                return truthful == find_detail("truthful_payoff") &&
                       deviant == find_detail("deviation_payoff") && deviant > truthful;
            }
            case Property::ir: {
                if (!viol.player) return false;
                const Rat payoff =
                    player_payoff(mech.evaluate(viol.profile), viol.profile, *viol.player);
                return payoff == find_detail("payoff") && payoff < kZero;
            }
            case Property::bb: {
                const Outcome out = mech.evaluate(viol.profile);
                Rat receipts(0);
                Rat payments(0);
                for (const Rat& x : out.seller_receipts) receipts += x;
                for (const Rat& y : out.buyer_payments) payments += y;
                return receipts == find_detail("seller_total") &&
                       payments == find_detail("buyer_total") && receipts != payments;
            }
            case Property::nw: {
                const Outcome out = mech.evaluate(viol.profile);
                int sold = 0;
                int bought = 0;
                for (auto bit : out.seller_trades) sold += bit;
                for (auto bit : out.buyer_trades) bought += bit;
                return Rat(sold) == find_detail("sellers_trading") &&
                       Rat(bought) == find_detail("buyers_trading") && sold != bought;
            }
            case Property::common_price: {
                const Outcome out = mech.evaluate(viol.profile);
                const auto a = find_detail("player_a");
                const auto b = find_detail("player_b");
                if (!a || !b || !viol.player) return false;
                const Side side = viol.player->side;
                const PlayerId pa{side, static_cast<int>(a->num())};
                const PlayerId pb{side, static_cast<int>(b->num())};
                if (!player_trades(out, pa) || !player_trades(out, pb)) return false;
                return player_transfer(out, pa) == find_detail("transfer_a") &&
                       player_transfer(out, pb) == find_detail("transfer_b") &&
                       player_transfer(out, pa) != player_transfer(out, pb);
            }
            case Property::worst_type_zero: {
                if (!viol.player) return false;
                const Rat own = viol.profile.value(*viol.player);
                if (own != (viol.player->side == Side::seller ? kOne : kZero)) return false;
                const Outcome out = mech.evaluate(viol.profile);
                const Rat payoff = player_payoff(out, viol.profile, *viol.player);
                return payoff == find_detail("payoff") && payoff != kZero &&
                       player_transfer(out, *viol.player) == find_detail("transfer");
            }
            case Property::nonbossy: {
                if (!viol.player || !viol.deviation) return false;
                const Outcome base = mech.evaluate(viol.profile);
                ValuationProfile w = viol.profile;
                w.value(*viol.player) = *viol.deviation;
                const Outcome alt = mech.evaluate(w);
                if (player_trades(base, *viol.player) != player_trades(alt, *viol.player) ||
                    player_transfer(base, *viol.player) != player_transfer(alt, *viol.player)) {
                    return false;
                }
                const auto changed = parse_player_label(viol.note);
                if (!changed) return false;
                return player_transfer(base, *changed) == find_detail("before") &&
                       player_transfer(alt, *changed) == find_detail("after") &&
                       player_transfer(base, *changed) != player_transfer(alt, *changed);
            }
            case Property::allocation_monotone: {
                if (!viol.player || !viol.deviation) return false;
                const bool at_profile =
                    player_trades(mech.evaluate(viol.profile), *viol.player);
                ValuationProfile w = viol.profile;
                w.value(*viol.player) = *viol.deviation;
                const bool at_deviation = player_trades(mech.evaluate(w), *viol.player);
                if (Rat(at_deviation ? 1 : 0) != find_detail("allocation_at_deviation") ||
                    Rat(at_profile ? 1 : 0) != find_detail("allocation_at_profile")) {
                    return false;
                }
                if (!(*viol.deviation < viol.profile.value(*viol.player))) return false;
                return viol.player->side == Side::seller ? (!at_deviation && at_profile)
                                                         : (at_deviation && !at_profile);
            }
            case Property::payoff_envelope: {
                // The integral estimate depends on the scanned grid; replay
                // re-derives the profile-level payoffs and re-checks the gap.
                if (!viol.player) return false;
                const Rat payoff =
                    player_payoff(mech.evaluate(viol.profile), viol.profile, *viol.player);
                ValuationProfile w = viol.profile;
                w.value(*viol.player) = viol.player->side == Side::seller ? kOne : kZero;
                const Rat worst = player_payoff(mech.evaluate(w), w, *viol.player);
                const auto integral = find_detail("integral_estimate");
                const auto tol = find_detail("tolerance");
                if (!integral || !tol) return false;
                return payoff == find_detail("payoff") && worst == find_detail("worst_type_payoff") &&
                       abs(payoff - *integral - worst) > *tol;
            }
            case Property::trade_structure: {
                const Outcome out = mech.evaluate(viol.profile);
                const TraderSet ts = trader_set(out);
                if (viol.note == "volume_mismatch") {
                    return Rat(static_cast<std::int64_t>(ts.sellers.size())) ==
                               find_detail("sellers_trading") &&
                           Rat(static_cast<std::int64_t>(ts.buyers.size())) ==
                               find_detail("buyers_trading") &&
                           ts.sellers.size() != ts.buyers.size();
                }
                if (viol.note == "no_common_price") {
                    return !uniform_trade_price(out, ts).has_value();
                }
                if (viol.note == "bystander_transfer") {
                    if (!viol.player || player_trades(out, *viol.player)) return false;
                    const Rat transfer = player_transfer(out, *viol.player);
                    return transfer == find_detail("transfer") && transfer != kZero;
                }
                if (viol.note == "price_bound") {
                    if (!viol.player || !player_trades(out, *viol.player)) return false;
                    const auto price = uniform_trade_price(out, ts);
                    if (!price || *price != find_detail("price")) return false;
                    const Rat value = viol.profile.value(*viol.player);
                    if (value != find_detail("valuation")) return false;
                    return viol.player->side == Side::seller ? value > *price : value < *price;
                }
                if (viol.note == "trader_value_moves_price") {
                    if (!viol.player || !viol.deviation) return false;
                    const auto price = uniform_trade_price(out, ts);
                    ValuationProfile w = viol.profile;
                    w.value(*viol.player) = *viol.deviation;
                    const Outcome alt = mech.evaluate(w);
                    if (trader_set(alt) != ts) return false;
                    const auto alt_price = uniform_trade_price(alt, ts);
                    return price && alt_price && *price == find_detail("price") &&
                           *alt_price == find_detail("perturbed_price") && *price != *alt_price;
                }
                return false;
            }
            case Property::set_price_constancy: {
                if (!viol.alt_profile) return false;
                const Outcome a = mech.evaluate(viol.profile);
                const Outcome b = mech.evaluate(*viol.alt_profile);
                const TraderSet ts_a = trader_set(a);
                const TraderSet ts_b = trader_set(b);
                if (!(ts_a == ts_b) || ts_a.empty()) return false;
                const auto pa = side_prices(a, ts_a);
                const auto pb = side_prices(b, ts_b);
                if (!pa || !pb || *pa == *pb) return false;
                auto matches = [&](const std::optional<Rat>& price, const char* key) {
                    const auto stored = find_detail(key);
                    if (price.has_value() != stored.has_value()) return false;
                    return !price || *price == *stored;
                };
                return matches(pa->first, "seller_price_a") && matches(pa->second, "buyer_price_a") &&
                       matches(pb->first, "seller_price_b") && matches(pb->second, "buyer_price_b");
            }
            case Property::value_respecting: {
                if (!viol.player) return false;
                const Outcome out = mech.evaluate(viol.profile);
                if (player_trades(out, *viol.player)) return false;
                const auto trader = parse_player_label(viol.note);
                if (!trader || !player_trades(out, *trader)) return false;
                if (trader->side != viol.player->side) return false;
                const Rat mine = viol.profile.value(*viol.player);
                const Rat theirs = viol.profile.value(*trader);
                if (mine != find_detail("nontrader_value") || theirs != find_detail("trader_value")) {
                    return false;
                }
                return viol.player->side == Side::seller ? mine < theirs : mine > theirs;
            }
        }
    } catch (const std::exception&) {
        return false;
    }
    return false;
}

}  // namespace damt
