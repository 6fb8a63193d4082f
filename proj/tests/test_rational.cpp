#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "damt/errors.hpp"
#include "damt/rational.hpp"

using damt::Rat;

TEST_CASE("decimal parsing is exact") {
    CHECK(Rat::parse("0.35") == Rat(35, 100));
    CHECK(Rat::parse("0.35") == Rat(7, 20));
    CHECK(Rat::parse(".5") == Rat(1, 2));
    CHECK(Rat::parse("-0.3") == Rat(-3, 10));
    CHECK(Rat::parse("1") == Rat(1));
    CHECK(Rat::parse("0.000001") == Rat(1, 1000000));
    CHECK(Rat::parse("7/20") == Rat(7, 20));
    CHECK(Rat::parse("-7/20") == Rat(-7, 20));
}

TEST_CASE("canonical text round-trips") {
    for (const char* text : {"0", "1", "0.5", "-0.3", "0.05", "0.375", "0.000001", "13", "-2"}) {
        CHECK(Rat::parse(text).str() == text);
    }
    // non-terminating decimals fall back to fractions
    CHECK(Rat(1, 3).str() == "1/3");
    CHECK(Rat::parse(Rat(1, 3).str()) == Rat(1, 3));
    CHECK(Rat(-5, 7).str() == "-5/7");
    // small denominators with leading fraction zeros
    CHECK(Rat(1, 20).str() == "0.05");
    CHECK(Rat(1, 200).str() == "0.005");
}

TEST_CASE("arithmetic stays exact") {
    const Rat a = Rat::parse("0.1");
    Rat sum(0);
    for (int i = 0; i < 10; ++i) sum += a;
    CHECK(sum == Rat(1));

    CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
    CHECK(Rat(1, 2) * Rat(2, 3) == Rat(1, 3));
    CHECK(Rat(7, 20) - Rat(7, 20) == Rat(0));
    CHECK(Rat(1, 2) / Rat(1, 4) == Rat(2));
    CHECK(-Rat(3, 5) == Rat(-3, 5));
    CHECK(damt::abs(Rat(-3, 5)) == Rat(3, 5));
}

TEST_CASE("ordering is total and exact") {
    CHECK(Rat(1, 3) < Rat(34, 100));
    CHECK(Rat(2, 6) == Rat(1, 3));
    CHECK(Rat(-1, 2) < Rat(0));
    CHECK(damt::min(Rat(1, 3), Rat(1, 4)) == Rat(1, 4));
    CHECK(damt::max(Rat(1, 3), Rat(1, 4)) == Rat(1, 3));
}

TEST_CASE("bad literals are rejected") {
    CHECK_THROWS_AS(Rat::parse(""), damt::config_error);
    CHECK_THROWS_AS(Rat::parse("abc"), damt::config_error);
    CHECK_THROWS_AS(Rat::parse("1.2.3"), damt::config_error);
    CHECK_THROWS_AS(Rat::parse("1/"), damt::config_error);
    CHECK_THROWS_AS(Rat::parse("--1"), damt::config_error);
    CHECK_THROWS_AS(Rat::parse("0.1234567890123456789012"), damt::config_error);
}

TEST_CASE("zero denominators and overflow are loud") {
    CHECK_THROWS_AS(Rat(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
    const Rat huge(9223372036854775807LL);
    CHECK_THROWS_AS(huge * huge, std::overflow_error);
}
