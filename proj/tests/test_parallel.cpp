#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "damt/mechanisms.hpp"
#include "damt/search.hpp"
#include "damt/verify.hpp"

using namespace damt;

namespace {

Mechanism buyer_overbid_linear() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(1), Rat(0), Rat(0)};
    params.seller_priority = {0, 1};
    params.buyer_priority = {1, 0, 2};
    return make_linear_price({2, 3}, std::move(params));
}

CheckOptions with_jobs(int jobs, std::size_t cap = 1000000) {
    CheckOptions options;
    options.jobs = jobs;
    options.max_violations = cap;
    return options;
}

}  // namespace

// The serial loop is the reference; the chunked OpenMP path must reproduce
// its output exactly, for every checker and any worker count.
TEST_CASE("parallel scans reproduce the serial reference bit for bit") {
    struct Case {
        Mechanism mech;
        Grid grid;
    };
    std::vector<Case> cases;
    cases.push_back({make_low_bid_price(), Grid::uniform({1, 2}, 9)});
    {
        const std::vector<Rat> axis{Rat::parse("0.05"), Rat::parse("0.1"), Rat::parse("0.3"),
                                    Rat::parse("0.5"), Rat::parse("0.7"), Rat::parse("0.95")};
        cases.push_back({buyer_overbid_linear(), Grid::from_points({axis, axis}, {axis, axis, axis})});
    }
    {
        const Mechanism spread = make_spread_posted_price(Rat::parse("0.3"), Rat::parse("0.6"));
        const Grid grid = Grid::for_mechanism(spread, 7);
        cases.push_back({spread, grid});
    }

    const std::vector<Property> properties = {
        Property::ic,          Property::ir,        Property::bb,
        Property::nw,          Property::common_price, Property::worst_type_zero,
        Property::nonbossy,    Property::allocation_monotone, Property::payoff_envelope,
        Property::trade_structure, Property::set_price_constancy, Property::value_respecting,
    };

    for (const Case& test_case : cases) {
        for (Property property : properties) {
            if (property == Property::worst_type_zero &&
                !test_case.grid.has_worst_type_points()) {
                continue;  // that check refuses grids without the extreme points
            }
            const CheckResult serial =
                run_property_check(property, test_case.mech, test_case.grid, with_jobs(1));
            for (int jobs : {2, 3, 8}) {
                const CheckResult parallel =
                    run_property_check(property, test_case.mech, test_case.grid, with_jobs(jobs));
                REQUIRE(parallel.total == serial.total);
                REQUIRE(parallel.truncated == serial.truncated);
                REQUIRE(parallel.violations == serial.violations);
            }
        }
    }
}

TEST_CASE("capped runs keep the same leading witnesses under any worker count") {
    const Mechanism mech = make_low_bid_price();
    const Grid grid = Grid::uniform({1, 2}, 11);
    const CheckResult serial = check_nonbossy(mech, grid, with_jobs(1, 7));
    for (int jobs : {2, 5}) {
        const CheckResult parallel = check_nonbossy(mech, grid, with_jobs(jobs, 7));
        REQUIRE(parallel.violations == serial.violations);
        REQUIRE(parallel.total == serial.total);
    }
}

TEST_CASE("the miner is worker-count invariant too") {
    const Mechanism mech = buyer_overbid_linear();
    const std::vector<Rat> axis{Rat::parse("0.05"), Rat::parse("0.1"), Rat::parse("0.3"),
                                Rat::parse("0.5"), Rat::parse("0.7"), Rat::parse("0.95")};
    const Grid grid = Grid::from_points({axis, axis}, {axis, axis, axis});

    MineOptions serial;
    serial.jobs = 1;
    const auto reference = mine_ic_failures(mech, grid, serial);
    REQUIRE(!reference.empty());
    for (int jobs : {2, 4}) {
        MineOptions options;
        options.jobs = jobs;
        REQUIRE(mine_ic_failures(mech, grid, options) == reference);
    }
}
