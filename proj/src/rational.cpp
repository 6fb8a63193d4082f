#include "damt/rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

#include "damt/errors.hpp"

namespace damt {

namespace {

using i128 = __int128;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("rational overflow");
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rat Rat::reduced(i128 num, i128 den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        return Rat();
    }
    i128 g = gcd128(num, den);
    Rat r;
    r.num_ = narrow(num / g);
    r.den_ = narrow(den / g);
    return r;
}

Rat::Rat(std::int64_t num, std::int64_t den) { *this = reduced(num, den); }

Rat operator+(const Rat& a, const Rat& b) {
    return Rat::reduced(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rat operator-(const Rat& a, const Rat& b) {
    return Rat::reduced(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rat operator*(const Rat& a, const Rat& b) {
    return Rat::reduced(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) {
        throw std::domain_error("rational division by zero");
    }
    return Rat::reduced(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

Rat Rat::operator-() const {
    Rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

std::strong_ordering Rat::operator<=>(const Rat& o) const {
    i128 lhs = i128(num_) * o.den_;
    i128 rhs = i128(o.num_) * den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rat Rat::parse(std::string_view text) {
    if (text.empty()) {
        throw config_error("empty number literal");
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) {
        throw config_error("bad number literal: '" + std::string(text) + "'");
    }

    auto slash = text.find('/', pos);
    if (slash != std::string_view::npos) {
        // fraction form
        std::string_view num_part = text.substr(pos, slash - pos);
        std::string_view den_part = text.substr(slash + 1);
        if (num_part.empty() || den_part.empty()) {
            throw config_error("bad fraction literal: '" + std::string(text) + "'");
        }
        i128 num = 0;
        i128 den = 0;
        for (char c : num_part) {
            if (c < '0' || c > '9') throw config_error("bad fraction literal: '" + std::string(text) + "'");
            num = num * 10 + (c - '0');
            if (num > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("rational overflow");
        }
        for (char c : den_part) {
            if (c < '0' || c > '9') throw config_error("bad fraction literal: '" + std::string(text) + "'");
            den = den * 10 + (c - '0');
            if (den > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("rational overflow");
        }
        return reduced(negative ? -num : num, den);
    }

    i128 scaled = 0;  // digits with the decimal point removed
    int fraction_digits = -1;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c == '.') {
            if (fraction_digits >= 0) {
                throw config_error("bad decimal literal: '" + std::string(text) + "'");
            }
            fraction_digits = 0;
            continue;
        }
        if (c < '0' || c > '9') {
            throw config_error("bad decimal literal: '" + std::string(text) + "'");
        }
        scaled = scaled * 10 + (c - '0');
        if (scaled > i128(std::numeric_limits<std::int64_t>::max()) * 10) {
            throw std::overflow_error("rational overflow");
        }
        if (fraction_digits >= 0) {
            ++fraction_digits;
            if (fraction_digits > 18) {
                throw config_error("decimal literal with more than 18 fraction digits: '" +
                                   std::string(text) + "'");
            }
        }
    }
    i128 den = 1;
    for (int i = 0; i < std::max(fraction_digits, 0); ++i) den *= 10;
    return reduced(negative ? -scaled : scaled, den);
}

std::string Rat::str() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    // Terminating decimal iff den = 2^a 5^b.
    std::int64_t d = den_;
    int twos = 0;
    int fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    int digits = std::max(twos, fives);
    i128 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    i128 scaled = i128(num_) * scale / den_;
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    // digits is minimal for a normalized fraction, so the last decimal digit
    // is never zero; body collects the fraction digits least significant first.
    std::string body;
    for (int i = 0; i < digits; ++i) {
        body.push_back(static_cast<char>('0' + static_cast<int>(scaled % 10)));
        scaled /= 10;
    }
    std::string head = scaled == 0 ? "0" : [](i128 v) {
        std::string s;
        while (v > 0) {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
            v /= 10;
        }
        return s;
    }(scaled);
    std::string out = negative ? "-" : "";
    out += head;
    if (!body.empty()) {
        out += ".";
        for (auto it = body.rbegin(); it != body.rend(); ++it) out.push_back(*it);
    }
    return out;
}

Rat abs(const Rat& r) { return r.is_negative() ? -r : r; }
Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace damt
