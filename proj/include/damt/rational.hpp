#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace damt {

// Exact rational number on a 64-bit numerator and positive 64-bit
// denominator, always kept normalized (gcd 1, denominator > 0).
// Every valuation, price and transfer in the toolkit is a Rat, so equality
// tests in the checkers ("same price", "zero transfer") are exact.
// Intermediates run in 128-bit arithmetic; a result whose reduced form does
// not fit 64 bits throws std::overflow_error.
class Rat {
public:
    constexpr Rat() = default;
    Rat(std::int64_t value) : num_(value), den_(1) {}
    Rat(std::int64_t num, std::int64_t den);

    // Accepts decimal literals ("0.35", "-1", ".5") and fractions ("7/20").
    static Rat parse(std::string_view text);

    // Canonical text form: terminating decimal when the denominator is
    // 2^a 5^b, otherwise "num/den". parse(str()) round-trips exactly.
    std::string str() const;

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    friend Rat operator+(const Rat& a, const Rat& b);
    friend Rat operator-(const Rat& a, const Rat& b);
    friend Rat operator*(const Rat& a, const Rat& b);
    friend Rat operator/(const Rat& a, const Rat& b);
    Rat operator-() const;
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }

    bool operator==(const Rat& o) const = default;
    std::strong_ordering operator<=>(const Rat& o) const;

private:
    static Rat reduced(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rat abs(const Rat& r);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace damt
