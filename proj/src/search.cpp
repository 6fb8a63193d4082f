#include "damt/search.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace damt {

namespace {

const Rat kZero(0);
const Rat kOne(1);

void require_report_grid(const std::vector<Rat>& report_grid) {
    if (report_grid.empty()) {
        throw config_error("report grid is empty");
    }
    for (const Rat& r : report_grid) {
        if (r < kZero || r > kOne) {
            throw config_error("report grid leaves [0,1]");
        }
    }
}

std::vector<PlayerId> all_players(const MarketShape& shape) {
    std::vector<PlayerId> ids;
    ids.reserve(shape.players());
    for (int i = 0; i < shape.sellers; ++i) ids.push_back({Side::seller, i});
    for (int j = 0; j < shape.buyers; ++j) ids.push_back({Side::buyer, j});
    return ids;
}

std::pair<std::uint64_t, std::uint64_t> chunk_bounds(std::uint64_t count, int chunks, int c) {
    const std::uint64_t base = count / chunks;
    const std::uint64_t rem = count % chunks;
    const std::uint64_t extra = std::min<std::uint64_t>(c, rem);
    const std::uint64_t lo = base * c + extra;
    const std::uint64_t hi = lo + base + (static_cast<std::uint64_t>(c) < rem ? 1 : 0);
    return {lo, hi};
}

}  // namespace

bool deviation_less(const Deviation& a, const Deviation& b) {
    if (auto c = compare_profiles(a.profile, b.profile); c != 0) return c < 0;
    if (a.player != b.player) return a.player < b.player;
    return a.report < b.report;
}

std::vector<Rat> default_report_grid(const Grid& grid) {
    std::vector<Rat> reports{kZero, Rat(1, 100), Rat(99, 100), kOne};
    const MarketShape shape = grid.shape();
    for (int i = 0; i < shape.sellers; ++i) {
        const auto& axis = grid.seller_axis(i);
        reports.insert(reports.end(), axis.begin(), axis.end());
    }
    for (int j = 0; j < shape.buyers; ++j) {
        const auto& axis = grid.buyer_axis(j);
        reports.insert(reports.end(), axis.begin(), axis.end());
    }
    std::sort(reports.begin(), reports.end());
    reports.erase(std::unique(reports.begin(), reports.end()), reports.end());
    return reports;
}

std::optional<Deviation> best_deviation(const Mechanism& mech, const ValuationProfile& v,
                                        const PlayerId& player,
                                        const std::vector<Rat>& report_grid) {
    validate_profile(v, mech.shape());
    require_report_grid(report_grid);
    if ((player.side == Side::seller && player.index >= mech.shape().sellers) ||
        (player.side == Side::buyer && player.index >= mech.shape().buyers) || player.index < 0) {
        throw dimension_error("player index out of range");
    }

    const Rat true_value = v.value(player);
    const Rat truthful = player_payoff(mech.evaluate(v), v, player);

    std::optional<Deviation> best;
    ValuationProfile w = v;
    for (const Rat& report : report_grid) {
        if (report == true_value) continue;
        w.value(player) = report;
        const Rat payoff = player_payoff_with_true_value(mech.evaluate(w), player, true_value);
        const Rat gain = payoff - truthful;
        if (gain > kZero && (!best || gain > best->gain)) {
            best = Deviation{player, v, report, gain};
        }
    }
    return best;
}

std::vector<Deviation> mine_ic_failures(const Mechanism& mech, const Grid& grid,
                                        const std::vector<Rat>& report_grid,
                                        const MineOptions& options) {
    if (!(mech.shape() == grid.shape())) {
        throw dimension_error("grid shape does not match mechanism shape");
    }
    require_report_grid(report_grid);

    const auto players = all_players(mech.shape());
    auto scan_range = [&](std::uint64_t lo, std::uint64_t hi, std::vector<Deviation>& found) {
        ValuationProfile v;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            grid.write_profile(idx, v);
            for (const PlayerId id : players) {
                if (auto dev = best_deviation(mech, v, id, report_grid)) {
                    found.push_back(std::move(*dev));
                }
            }
        }
    };

    const std::uint64_t count = grid.profile_count();
    std::vector<Deviation> found;
#ifdef _OPENMP
    int jobs = options.jobs <= 0 ? std::max(1, omp_get_max_threads()) : options.jobs;
    if (static_cast<std::uint64_t>(jobs) > count) jobs = static_cast<int>(std::max<std::uint64_t>(1, count));
    if (jobs > 1) {
        std::vector<std::vector<Deviation>> partial(jobs);
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
        for (auto& part : partial) {
            for (auto& dev : part) found.push_back(std::move(dev));
        }
    } else {
        scan_range(0, count, found);
    }
#else
    scan_range(0, count, found);
#endif

    std::stable_sort(found.begin(), found.end(), deviation_less);
    return found;
}

std::vector<Deviation> mine_ic_failures(const Mechanism& mech, const Grid& grid,
                                        const MineOptions& options) {
    return mine_ic_failures(mech, grid, default_report_grid(grid), options);
}

bool replay_deviation(const Mechanism& mech, const Deviation& deviation) {
    try {
        const Rat truthful =
            player_payoff(mech.evaluate(deviation.profile), deviation.profile, deviation.player);
        ValuationProfile w = deviation.profile;
        w.value(deviation.player) = deviation.report;
        const Rat deviant = player_payoff_with_true_value(
            mech.evaluate(w), deviation.player, deviation.profile.value(deviation.player));
        return deviant - truthful == deviation.gain && deviation.gain > kZero;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace damt
