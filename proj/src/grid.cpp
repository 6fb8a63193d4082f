#include "damt/grid.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace damt {

namespace {

void validate_axis(const std::vector<Rat>& axis, const char* side, int index) {
    std::ostringstream who;
    who << side << " " << index + 1;
    if (axis.empty()) {
        throw config_error("grid axis for " + who.str() + " is empty");
    }
    const Rat zero(0);
    const Rat one(1);
    for (std::size_t k = 0; k < axis.size(); ++k) {
        if (axis[k] < zero || axis[k] > one) {
            throw config_error("grid axis for " + who.str() + " leaves [0,1]");
        }
        if (k > 0 && !(axis[k - 1] < axis[k])) {
            throw config_error("grid axis for " + who.str() + " is not strictly ascending");
        }
    }
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& text) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<Rat> straddled_axis(std::vector<Rat> axis, const std::vector<Rat>& prices,
                                const Rat& half_step) {
    const Rat zero(0);
    const Rat one(1);
    for (const Rat& price : prices) {
        for (const Rat& candidate : {price, price - half_step, price + half_step}) {
            if (candidate >= zero && candidate <= one) axis.push_back(candidate);
        }
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    return axis;
}

}  // namespace

Grid Grid::from_points(std::vector<std::vector<Rat>> seller_axes,
                       std::vector<std::vector<Rat>> buyer_axes) {
    Grid g;
    g.shape_ = {static_cast<int>(seller_axes.size()), static_cast<int>(buyer_axes.size())};
    validate_shape(g.shape_);
    for (int i = 0; i < g.shape_.sellers; ++i) validate_axis(seller_axes[i], "seller", i);
    for (int j = 0; j < g.shape_.buyers; ++j) validate_axis(buyer_axes[j], "buyer", j);
    g.seller_axes_ = std::move(seller_axes);
    g.buyer_axes_ = std::move(buyer_axes);

    std::uint64_t count = 1;
    auto accumulate = [&count](const std::vector<Rat>& axis) {
        std::uint64_t size = axis.size();
        if (count > std::numeric_limits<std::uint64_t>::max() / size) {
            throw config_error("grid profile count overflows 64 bits");
        }
        count *= size;
    };
    for (const auto& axis : g.seller_axes_) accumulate(axis);
    for (const auto& axis : g.buyer_axes_) accumulate(axis);
    g.profile_count_ = count;
    return g;
}

Grid Grid::uniform(const MarketShape& shape, int points_per_player) {
    validate_shape(shape);
    if (points_per_player < 2) {
        throw config_error("grid needs at least 2 points per player");
    }
    std::vector<Rat> axis;
    axis.reserve(points_per_player);
    for (int k = 0; k < points_per_player; ++k) {
        axis.emplace_back(k, points_per_player - 1);
    }
    return from_points(std::vector<std::vector<Rat>>(shape.sellers, axis),
                       std::vector<std::vector<Rat>>(shape.buyers, axis));
}

Grid Grid::for_mechanism(const Mechanism& mech, int points_per_player) {
    if (points_per_player < 2) {
        throw config_error("grid needs at least 2 points per player");
    }
    std::vector<Rat> axis;
    axis.reserve(points_per_player);
    for (int k = 0; k < points_per_player; ++k) {
        axis.emplace_back(k, points_per_player - 1);
    }
    const Rat half_step(1, 2 * (points_per_player - 1));
    axis = straddled_axis(std::move(axis), mech.price_hints(), half_step);
    return from_points(std::vector<std::vector<Rat>>(mech.shape().sellers, axis),
                       std::vector<std::vector<Rat>>(mech.shape().buyers, axis));
}

ValuationProfile Grid::profile_at(std::uint64_t index) const {
    ValuationProfile v;
    write_profile(index, v);
    return v;
}

void Grid::write_profile(std::uint64_t index, ValuationProfile& scratch) const {
    scratch.sellers.resize(shape_.sellers);
    scratch.buyers.resize(shape_.buyers);
    // Last axis varies fastest, so ascending index is lexicographic order.
    for (int j = shape_.buyers - 1; j >= 0; --j) {
        const auto& axis = buyer_axes_[j];
        scratch.buyers[j] = axis[index % axis.size()];
        index /= axis.size();
    }
    for (int i = shape_.sellers - 1; i >= 0; --i) {
        const auto& axis = seller_axes_[i];
        scratch.sellers[i] = axis[index % axis.size()];
        index /= axis.size();
    }
}

std::vector<int> Grid::points_per_player() const {
    std::vector<int> counts;
    counts.reserve(shape_.players());
    for (const auto& axis : seller_axes_) counts.push_back(static_cast<int>(axis.size()));
    for (const auto& axis : buyer_axes_) counts.push_back(static_cast<int>(axis.size()));
    return counts;
}

Rat Grid::max_step() const {
    Rat widest(0);
    auto scan = [&widest](const std::vector<Rat>& axis) {
        widest = max(widest, axis.front() - Rat(0));
        for (std::size_t k = 1; k < axis.size(); ++k) {
            widest = max(widest, axis[k] - axis[k - 1]);
        }
        widest = max(widest, Rat(1) - axis.back());
    };
    for (const auto& axis : seller_axes_) scan(axis);
    for (const auto& axis : buyer_axes_) scan(axis);
    return widest;
}

bool Grid::has_worst_type_points() const {
    const Rat zero(0);
    const Rat one(1);
    for (const auto& axis : seller_axes_) {
        if (axis.back() != one) return false;
    }
    for (const auto& axis : buyer_axes_) {
        if (axis.front() != zero) return false;
    }
    return true;
}

std::string Grid::fingerprint() const {
    std::ostringstream os;
    auto counts = points_per_player();
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k) os << ",";
        os << counts[k];
    }
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& axis : seller_axes_) {
        for (const Rat& r : axis) h = fnv1a(h, r.str() + "|");
    }
    h = fnv1a(h, "/");
    for (const auto& axis : buyer_axes_) {
        for (const Rat& r : axis) h = fnv1a(h, r.str() + "|");
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return os.str() + "/fnv1a:" + hex.str();
}

}  // namespace damt
