#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "damt/core.hpp"

namespace damt {

// Finite per-player valuation sets discretizing [0,1]^(m+n). Every axis is
// nonempty, strictly ascending and inside the unit interval, so the profile
// set is a finite box enumerated in lexicographic order.
class Grid {
public:
    static Grid from_points(std::vector<std::vector<Rat>> seller_axes,
                            std::vector<std::vector<Rat>> buyer_axes);

    // points_per_player equispaced points {0, 1/(N-1), ..., 1} on every axis.
    static Grid uniform(const MarketShape& shape, int points_per_player);

    // Uniform grid plus, on every axis, each of the mechanism's constant
    // prices and its +-half-step neighbors, so price boundaries are
    // straddled by grid points.
    static Grid for_mechanism(const Mechanism& mech, int points_per_player);

    const MarketShape& shape() const { return shape_; }
    std::uint64_t profile_count() const { return profile_count_; }

    const std::vector<Rat>& seller_axis(int i) const { return seller_axes_.at(i); }
    const std::vector<Rat>& buyer_axis(int j) const { return buyer_axes_.at(j); }
    const std::vector<Rat>& axis(const PlayerId& id) const {
        return id.side == Side::seller ? seller_axis(id.index) : buyer_axis(id.index);
    }

    ValuationProfile profile_at(std::uint64_t index) const;
    // Allocation-free variant for scan loops; resizes scratch on first use.
    void write_profile(std::uint64_t index, ValuationProfile& scratch) const;

    std::vector<int> points_per_player() const;

    // Largest gap between consecutive axis points, including the implicit
    // gaps to the interval ends 0 and 1. Lower bound for the envelope-check
    // tolerance.
    Rat max_step() const;

    bool has_worst_type_points() const;  // 1 on every seller axis, 0 on every buyer axis

    // "13,13,13/fnv1a:..." - points per player plus a hash of all axis
    // values; identifies the scanned profile set.
    std::string fingerprint() const;

private:
    Grid() = default;

    MarketShape shape_;
    std::vector<std::vector<Rat>> seller_axes_;
    std::vector<std::vector<Rat>> buyer_axes_;
    std::uint64_t profile_count_ = 0;
};

}  // namespace damt
