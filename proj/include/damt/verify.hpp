#pragma once

#include <optional>
#include <vector>

#include "damt/grid.hpp"
#include "damt/violation.hpp"

namespace damt {

// Exhaustive grid-resolution audits. Every checker quantifies over grid
// profiles only: an empty result is evidence at the grid's resolution, not
// a proof over the continuum. All equality tests are exact; only the
// envelope check carries a tolerance, because its integral is discretized.

// Truthful payoff at least the payoff of any unilateral grid misreport.
CheckResult check_ic(const Mechanism& mech, const Grid& grid, const CheckOptions& options = {});

// Nonnegative payoff for every player at every profile.
CheckResult check_ir(const Mechanism& mech, const Grid& grid, const CheckOptions& options = {});

// Sum of seller receipts equals sum of buyer payments, exactly.
CheckResult check_bb(const Mechanism& mech, const Grid& grid, const CheckOptions& options = {});

// Number of selling sellers equals number of buying buyers.
CheckResult check_nw(const Mechanism& mech, const Grid& grid, const CheckOptions& options = {});

// All trading sellers share one receipt and all trading buyers one payment.
CheckResult check_common_price(const Mechanism& mech, const Grid& grid,
                               const CheckOptions& options = {});

// Sellers at valuation 1 and buyers at valuation 0 get exactly zero payoff,
// for every opponent sub-profile on the grid. Requires the grid to carry
// those extreme points.
CheckResult check_worst_type_zero(const Mechanism& mech, const Grid& grid,
                                  const CheckOptions& options = {});

// If a report change leaves a player's own allocation and transfer alone,
// it must leave everyone's transfers alone.
CheckResult check_nonbossy(const Mechanism& mech, const Grid& grid,
                           const CheckOptions& options = {});

// Seller allocation weakly decreasing, buyer allocation weakly increasing
// along the player's own axis.
CheckResult check_allocation_monotone(const Mechanism& mech, const Grid& grid,
                                      const CheckOptions& options = {});

// |payoff - (Riemann sum of own allocation + worst-type payoff)| <= tol.
// tol defaults to the grid's widest step and may not be below it.
CheckResult check_payoff_envelope(const Mechanism& mech, const Grid& grid,
                                  std::optional<Rat> tolerance = {},
                                  const CheckOptions& options = {});

// At every profile with traders: equal volume, one common price, zero
// transfers for bystanders, price between every trader's valuation and, for
// each trader, a price that ignores own-value perturbations that keep the
// trader set fixed.
CheckResult check_trade_structure(const Mechanism& mech, const Grid& grid,
                                  const CheckOptions& options = {});

// Groups profiles by realized trader set and flags any set that trades at
// two different prices somewhere on the grid.
CheckResult check_set_price_constancy(const Mechanism& mech, const Grid& grid,
                                      const CheckOptions& options = {});

// No skipped seller strictly undercutting a trading seller and no skipped
// buyer strictly outbidding a trading buyer, unless the price bound or the
// mechanism's declared rationing priority explains the exclusion.
CheckResult check_value_respecting(const Mechanism& mech, const Grid& grid,
                                   const CheckOptions& options = {});

// Critical own-valuation at which a player's allocation switches, per
// opponent sub-profile, reported as the grid bracket and its midpoint.
struct Threshold {
    PlayerId player;
    ValuationProfile context;  // own coordinate set to the representative value
    Rat low;
    Rat high;
    Rat value;  // midpoint of [low, high]
};

struct ThresholdExtraction {
    std::vector<Threshold> thresholds;
    // Nonempty when the allocation is not monotone; thresholds are then empty.
    std::vector<Violation> monotonicity_violations;
};

ThresholdExtraction extract_thresholds(const Mechanism& mech, const Grid& grid);

// Re-evaluates the mechanism at the stored profile(s) and checks the stored
// evidence reproduces exactly.
bool replay_violation(const Mechanism& mech, const Violation& violation);

// Dispatch by property; envelope_tolerance only applies to the envelope
// check.
CheckResult run_property_check(Property property, const Mechanism& mech, const Grid& grid,
                               const CheckOptions& options = {},
                               std::optional<Rat> envelope_tolerance = {});

}  // namespace damt
