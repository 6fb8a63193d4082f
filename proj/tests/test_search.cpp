#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "damt/mechanisms.hpp"
#include "damt/search.hpp"
#include "damt/verify.hpp"
#include "oracles.hpp"

using namespace damt;

namespace {

ValuationProfile profile(std::vector<const char*> sellers, std::vector<const char*> buyers) {
    ValuationProfile v;
    for (const char* s : sellers) v.sellers.push_back(Rat::parse(s));
    for (const char* b : buyers) v.buyers.push_back(Rat::parse(b));
    return v;
}

std::vector<Rat> reports(std::vector<const char*> values) {
    std::vector<Rat> out;
    for (const char* r : values) out.push_back(Rat::parse(r));
    return out;
}

Mechanism buyer_overbid_linear() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(1), Rat(0), Rat(0)};
    params.seller_priority = {0, 1};
    params.buyer_priority = {1, 0, 2};
    return make_linear_price({2, 3}, std::move(params));
}

Mechanism seller_underbid_linear() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(1, 2), Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(0), Rat(0)};
    params.seller_priority = {1, 0, 2};
    params.buyer_priority = {0, 1};
    return make_linear_price({3, 2}, std::move(params));
}

}  // namespace

TEST_CASE("no report moves a posted price, so nothing is mined") {
    const Mechanism posted = make_bilateral_posted_price(Rat::parse("0.5"));
    const Grid grid = Grid::for_mechanism(posted, 11);
    CHECK(!best_deviation(posted, profile({"0.2"}, {"0.8"}), {Side::seller, 0},
                          default_report_grid(grid))
               .has_value());
    CHECK(mine_ic_failures(posted, grid).empty());
}

TEST_CASE("the overbidding buyer walks the price down to the next statistic") {
    const Mechanism mech = buyer_overbid_linear();
    const ValuationProfile v = profile({"0.05", "0.5"}, {"0.7", "0.3", "0.1"});
    const PlayerId buyer{Side::buyer, 1};

    const auto dev = best_deviation(mech, v, buyer, reports({"0.05", "0.3", "0.95"}));
    REQUIRE(dev.has_value());
    CHECK(dev->report == Rat::parse("0.95"));
    CHECK(dev->gain == Rat::parse("0.2"));
    CHECK(replay_deviation(mech, *dev));

    // oracle agreement on the frozen gain
    CHECK(oracle::priced_trade_gain(2, 3, {Rat(0), Rat(0)}, {Rat(1), Rat(0), Rat(0)}, {0, 1},
                                    {1, 0, 2}, Rat(1, 2), v, buyer,
                                    Rat::parse("0.95")) == dev->gain);

    // ties in the gain break toward the smallest report: every report from
    // 0.5 up achieves the same 0.2
    const auto tied = best_deviation(mech, v, buyer, reports({"0.5", "0.7", "0.95"}));
    REQUIRE(tied.has_value());
    CHECK(tied->report == Rat::parse("0.5"));
    CHECK(tied->gain == Rat::parse("0.2"));

    // with identity rationing the same overbid pays off for the buyer the
    // priority favors, at the profile with the buyer labels swapped
    LinearPriceParams identity;
    identity.seller_coeffs = {Rat(0), Rat(0)};
    identity.buyer_coeffs = {Rat(1), Rat(0), Rat(0)};
    identity.seller_priority = {0, 1};
    identity.buyer_priority = {0, 1, 2};
    const Mechanism plain = make_linear_price({2, 3}, std::move(identity));
    const ValuationProfile swapped = profile({"0.05", "0.5"}, {"0.3", "0.7", "0.1"});
    const auto favored =
        best_deviation(plain, swapped, {Side::buyer, 0}, reports({"0.05", "0.95"}));
    REQUIRE(favored.has_value());
    CHECK(favored->report == Rat::parse("0.95"));
    CHECK(favored->gain == Rat::parse("0.2"));
}

TEST_CASE("the priority seller shades to zero and trades above value") {
    const Mechanism mech = seller_underbid_linear();
    const ValuationProfile v = profile({"0.05", "0.3", "0.9"}, {"0.95", "0.2"});
    const PlayerId seller{Side::seller, 1};

    const auto dev = best_deviation(mech, v, seller, reports({"0", "0.01", "0.9"}));
    REQUIRE(dev.has_value());
    CHECK(dev->report == Rat(0));  // 0 and 0.01 tie at gain 0.15; the smaller wins
    CHECK(dev->gain == Rat::parse("0.15"));
    CHECK(replay_deviation(mech, *dev));
    CHECK(oracle::priced_trade_gain(3, 2, {Rat(1, 2), Rat(0), Rat(0)}, {Rat(0), Rat(0)}, {1, 0, 2},
                                    {0, 1}, Rat(1, 2), v, seller, Rat(0)) == dev->gain);
}

TEST_CASE("mining the two tier rule: clean one way, profitable the other") {
    const Mechanism clean = make_two_tier_posted_price(Rat::parse("0.6"), Rat::parse("0.3"));
    CHECK(mine_ic_failures(clean, Grid::for_mechanism(clean, 11)).empty());

    const Mechanism reversed = make_two_tier_posted_price(Rat::parse("0.3"), Rat::parse("0.6"));
    const auto deviations = mine_ic_failures(reversed, Grid::for_mechanism(reversed, 11));
    REQUIRE(!deviations.empty());
    bool witnessed = false;
    for (const Deviation& dev : deviations) {
        REQUIRE(replay_deviation(reversed, dev));
        if (dev.player.side == Side::seller && dev.profile.sellers[0] < Rat::parse("0.3") &&
            dev.report >= Rat::parse("0.3") && dev.report < Rat::parse("0.6")) {
            witnessed = true;
        }
    }
    CHECK(witnessed);
}

TEST_CASE("the linear rule is mineable on a fine enough grid") {
    const Mechanism mech = buyer_overbid_linear();
    const std::vector<Rat> axis = reports({"0.05", "0.1", "0.3", "0.5", "0.7", "0.95"});
    const Grid grid = Grid::from_points({axis, axis}, {axis, axis, axis});
    const auto deviations = mine_ic_failures(mech, grid);
    REQUIRE(!deviations.empty());
    CHECK(std::is_sorted(deviations.begin(), deviations.end(), deviation_less));
    for (const Deviation& dev : deviations) {
        REQUIRE(replay_deviation(mech, dev));
    }
}

TEST_CASE("miner and truthfulness audit agree profile by profile") {
    const std::vector<Rat> axis = reports({"0", "0.25", "0.5", "0.75", "1"});

    std::vector<Mechanism> mechanisms;
    mechanisms.push_back(make_bilateral_posted_price(Rat::parse("0.5")));
    mechanisms.push_back(make_two_tier_posted_price(Rat::parse("0.3"), Rat::parse("0.6")));
    mechanisms.push_back(make_low_bid_price());
    mechanisms.push_back(buyer_overbid_linear());

    for (const Mechanism& mech : mechanisms) {
        const MarketShape shape = mech.shape();
        const Grid grid =
            Grid::from_points(std::vector<std::vector<Rat>>(shape.sellers, axis),
                              std::vector<std::vector<Rat>>(shape.buyers, axis));
        const auto mined = mine_ic_failures(mech, grid, axis);
        const CheckResult audited = check_ic(mech, grid, CheckOptions{0, 1000000});
        CHECK(mined.empty() == audited.passed());

        // the flagged (profile, player) pairs coincide
        auto key = [](const ValuationProfile& v, const PlayerId& id) {
            std::string text = player_label(id) + "@";
            for (const Rat& s : v.sellers) text += s.str() + ",";
            for (const Rat& b : v.buyers) text += b.str() + ",";
            return text;
        };
        std::vector<std::string> mined_keys;
        for (const Deviation& dev : mined) mined_keys.push_back(key(dev.profile, dev.player));
        std::vector<std::string> audit_keys;
        for (const Violation& viol : audited.violations) {
            audit_keys.push_back(key(viol.profile, *viol.player));
        }
        std::sort(mined_keys.begin(), mined_keys.end());
        mined_keys.erase(std::unique(mined_keys.begin(), mined_keys.end()), mined_keys.end());
        std::sort(audit_keys.begin(), audit_keys.end());
        audit_keys.erase(std::unique(audit_keys.begin(), audit_keys.end()), audit_keys.end());
        CHECK(mined_keys == audit_keys);
    }
}

TEST_CASE("a richer report grid never loses a deviation") {
    const Mechanism mech = buyer_overbid_linear();
    const std::vector<Rat> axis = reports({"0.05", "0.1", "0.3", "0.5", "0.7", "0.95"});
    const Grid grid = Grid::from_points({axis, axis}, {axis, axis, axis});

    const std::vector<Rat> narrow = reports({"0.3", "0.95"});
    std::vector<Rat> wide = narrow;
    for (const char* extra : {"0", "0.5", "0.99", "1"}) wide.push_back(Rat::parse(extra));
    std::sort(wide.begin(), wide.end());

    const auto small = mine_ic_failures(mech, grid, narrow);
    const auto large = mine_ic_failures(mech, grid, wide);
    REQUIRE(!small.empty());
    for (const Deviation& dev : small) {
        bool kept = false;
        for (const Deviation& other : large) {
            if (compare_profiles(other.profile, dev.profile) == 0 && other.player == dev.player) {
                kept = other.gain >= dev.gain;
            }
        }
        REQUIRE(kept);
    }
}

TEST_CASE("tampered deviations fail to replay") {
    const Mechanism mech = buyer_overbid_linear();
    const ValuationProfile v = profile({"0.05", "0.5"}, {"0.7", "0.3", "0.1"});
    auto dev = best_deviation(mech, v, {Side::buyer, 1}, reports({"0.95"}));
    REQUIRE(dev.has_value());
    dev->gain += Rat(1, 100);
    CHECK(!replay_deviation(mech, *dev));
}

TEST_CASE("the miner rejects bad inputs loudly") {
    const Mechanism posted = make_bilateral_posted_price(Rat::parse("0.5"));
    const ValuationProfile v = profile({"0.2"}, {"0.8"});
    CHECK_THROWS_AS(best_deviation(posted, v, {Side::seller, 0}, {}), config_error);
    CHECK_THROWS_AS(best_deviation(posted, v, {Side::seller, 0}, reports({"1.5"})), config_error);
    CHECK_THROWS_AS(best_deviation(posted, v, {Side::seller, 3}, reports({"0.5"})),
                    dimension_error);
    CHECK_THROWS_AS(mine_ic_failures(posted, Grid::uniform({1, 2}, 5)), dimension_error);
}
