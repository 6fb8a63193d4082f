#pragma once

#include <optional>
#include <vector>

#include "damt/grid.hpp"
#include "damt/violation.hpp"

namespace damt {

// A strictly profitable unilateral misreport: replaying the mechanism at
// the stored profile and at (report, others) reproduces the gain exactly.
struct Deviation {
    PlayerId player;
    ValuationProfile profile;  // true valuations
    Rat report;
    Rat gain;  // deviation payoff minus truthful payoff, > 0

    bool operator==(const Deviation&) const = default;
};

bool deviation_less(const Deviation& a, const Deviation& b);

// Report grid used by the miner when none is given: every grid point plus
// the interval ends 0 and 1 and the near-end reports 0.01 and 0.99, which
// the profitable-misreport constructions need strictly inside the interval.
std::vector<Rat> default_report_grid(const Grid& grid);

// Most profitable report for one player at one profile; ties broken toward
// the smallest report; absent when nothing strictly beats truth-telling.
std::optional<Deviation> best_deviation(const Mechanism& mech, const ValuationProfile& v,
                                        const PlayerId& player,
                                        const std::vector<Rat>& report_grid);

struct MineOptions {
    int jobs = 0;  // 0 = all available cores, 1 = serial reference path
};

// best_deviation for every grid profile and player, canonically sorted.
// An empty result certifies dominant-strategy truthfulness at the
// (grid x report grid) resolution.
std::vector<Deviation> mine_ic_failures(const Mechanism& mech, const Grid& grid,
                                        const std::vector<Rat>& report_grid,
                                        const MineOptions& options = {});

std::vector<Deviation> mine_ic_failures(const Mechanism& mech, const Grid& grid,
                                        const MineOptions& options = {});

bool replay_deviation(const Mechanism& mech, const Deviation& deviation);

}  // namespace damt
