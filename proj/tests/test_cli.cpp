#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "damt/cli.hpp"
#include "damt/config.hpp"
#include "damt/report.hpp"

using namespace damt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("damt_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
    fs::path file(const std::string& name, const std::string& contents) const {
        const fs::path where = path / name;
        std::ofstream out(where);
        out << contents;
        return where;
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const char* kLowBidConfig = R"({"kind": "example3"})";

const char* kLinearConfig = R"({
  "kind": "linear_price",
  "m": 2, "n": 3,
  "c": ["0", "0"],
  "d": ["1", "0", "0"],
  "sigma": [0, 1],
  "beta": [1, 0, 2],
  "fallback_price": "0.5"
})";

}  // namespace

TEST_CASE("config loading covers every mechanism kind") {
    CHECK(mechanism_from_json(nlohmann::json::parse(R"({"kind":"bilateral_posted","pi":"0.5"})"))
              .name() == "bilateral_posted");
    CHECK(mechanism_from_json(
              nlohmann::json::parse(R"({"kind":"example1","pi1":"0.3","pi2":"0.6"})"))
              .shape() == MarketShape{2, 2});
    CHECK(mechanism_from_json(
              nlohmann::json::parse(R"({"kind":"example2","pi_s":"0.3","pi_b":"0.6"})"))
              .shape() == MarketShape{1, 2});
    CHECK(mechanism_from_json(nlohmann::json::parse(R"({"kind":"example3"})")).shape() ==
          MarketShape{1, 2});
    CHECK(mechanism_from_json(
              nlohmann::json::parse(R"({"kind":"example4","pi":"0.6","pi_prime":"0.3"})"))
              .name() == "example4");
    CHECK(mechanism_from_json(nlohmann::json::parse(R"({
            "kind":"generalized_posted","m":1,"n":2,
            "price_map":[{"sellers":[0],"buyers":[0],"price":"0.6"},
                         {"sellers":[0],"buyers":[1],"price":"0.3"}]})"))
              .price_hints()
              .size() == 2);
    CHECK(mechanism_from_json(nlohmann::json::parse(kLinearConfig)).rationing().has_value());

    // priorities default to the identity order when omitted
    const Mechanism bare = mechanism_from_json(nlohmann::json::parse(
        R"({"kind":"linear_price","m":2,"n":2,"c":["0","0"],"d":["0.5","0"]})"));
    REQUIRE(bare.rationing().has_value());
    CHECK(bare.rationing()->sellers == std::vector<int>{0, 1});
    CHECK(bare.rationing()->buyers == std::vector<int>{0, 1});

    CHECK_THROWS_AS(mechanism_from_json(nlohmann::json::parse(R"({"kind":"nope"})")),
                    config_error);
    CHECK_THROWS_AS(mechanism_from_json(nlohmann::json::parse(R"({"pi":"0.5"})")), config_error);
    CHECK_THROWS_AS(mechanism_from_json(nlohmann::json::parse(R"({"kind":"bilateral_posted"})")),
                    config_error);
    CHECK_THROWS_AS(
        mechanism_from_json(nlohmann::json::parse(R"({"kind":"bilateral_posted","pi":0.5})")),
        config_error);
}

TEST_CASE("run prints the trace and honors the exit code contract") {
    TempDir dir;
    const auto config = dir.file("linear.json", kLinearConfig);

    CHECK(cli::run({"run", "--mechanism", config.string(), "0.05", "0.5", "0.7", "0.3", "0.1"}) ==
          0);
    // wrong arity
    CHECK(cli::run({"run", "--mechanism", config.string(), "0.05"}) == 2);
    // malformed values
    CHECK(cli::run({"run", "--mechanism", config.string(), "x", "0.5", "0.7", "0.3", "0.1"}) == 2);
    // missing file and broken JSON
    CHECK(cli::run({"run", "--mechanism", (dir.path / "absent.json").string(), "0.5", "0.5"}) ==
          2);
    const auto broken = dir.file("broken.json", "{");
    CHECK(cli::run({"run", "--mechanism", broken.string(), "0.5", "0.5"}) == 2);
}

TEST_CASE("check exits 0 on clean, 1 on violations, 2 on config errors") {
    TempDir dir;
    const auto posted = dir.file("posted.json", R"({"kind":"bilateral_posted","pi":"0.5"})");
    const auto low_bid = dir.file("low_bid.json", kLowBidConfig);

    CHECK(cli::run({"check", "--mechanism", posted.string(), "--grid", "7",
                    "--out", (dir.path / "posted_report.json").string()}) == 0);
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "7",
                    "--out", (dir.path / "low_bid_report.json").string()}) == 1);
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--properties", "bogus"}) == 2);
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "7", "--envelope-tol",
                    "0.01"}) == 2);
    CHECK(cli::run({"check"}) == 2);  // usage error: --mechanism is required
}

TEST_CASE("written reports parse back and re-render byte-identically") {
    TempDir dir;
    const auto low_bid = dir.file("low_bid.json", kLowBidConfig);
    const auto out = dir.path / "report.json";
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "9",
                    "--properties", "ic,a3,prop2", "--out", out.string()}) == 1);

    const std::string text = slurp(out);
    const Report parsed = report_from_json(nlohmann::json::parse(text));
    CHECK(render_document(report_to_json(parsed)) == text);
    CHECK(parsed.mechanism_name == "example3");
    CHECK(parsed.results.size() == 3);
    CHECK(parsed.results[0].result.passed());   // ic
    CHECK(!parsed.results[1].result.passed());  // a3
    CHECK(!parsed.results[2].result.passed());  // prop2
}

TEST_CASE("the violation cap keeps the count exact") {
    TempDir dir;
    const auto low_bid = dir.file("low_bid.json", kLowBidConfig);
    const auto capped_path = dir.path / "capped.json";
    const auto full_path = dir.path / "full.json";
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "11", "--properties",
                    "a3", "--max-violations", "5", "--out", capped_path.string()}) == 1);
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "11", "--properties",
                    "a3", "--max-violations", "100000", "--out", full_path.string()}) == 1);

    const Report capped = report_from_json(nlohmann::json::parse(slurp(capped_path)));
    const Report full = report_from_json(nlohmann::json::parse(slurp(full_path)));
    REQUIRE(capped.results.size() == 1);
    CHECK(capped.results[0].result.violations.size() == 5);
    CHECK(capped.results[0].result.truncated);
    CHECK(capped.results[0].result.total == full.results[0].result.total);
    CHECK(!full.results[0].result.truncated);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(capped.results[0].result.violations[k] == full.results[0].result.violations[k]);
    }
}

TEST_CASE("grid files drive the scan region explicitly") {
    TempDir dir;
    const auto linear = dir.file("linear.json", kLinearConfig);
    const auto grid = dir.file("grid.json", R"({
      "seller_points": [["0.05","0.1","0.3","0.5","0.7","0.95"],
                        ["0.05","0.1","0.3","0.5","0.7","0.95"]],
      "buyer_points": [["0.05","0.1","0.3","0.5","0.7","0.95"],
                       ["0.05","0.1","0.3","0.5","0.7","0.95"],
                       ["0.05","0.1","0.3","0.5","0.7","0.95"]]})");

    const auto out = dir.path / "mined.json";
    CHECK(cli::run({"mine", "--mechanism", linear.string(), "--grid-file", grid.string(),
                    "--out", out.string()}) == 1);
    const DeviationReport report =
        deviation_report_from_json(nlohmann::json::parse(slurp(out)));
    CHECK(report.total > 0);
    CHECK(!report.deviations.empty());

    // a grid of the wrong shape is a configuration error
    const auto bad_grid = dir.file("bad_grid.json", R"({
      "seller_points": [["0","1"]],
      "buyer_points": [["0","1"]]})");
    CHECK(cli::run({"mine", "--mechanism", linear.string(), "--grid-file", bad_grid.string()}) ==
          2);
}

TEST_CASE("mine exits 0 when the rule is truthful") {
    TempDir dir;
    const auto clean =
        dir.file("two_tier.json", R"({"kind":"example4","pi":"0.6","pi_prime":"0.3"})");
    const auto reversed =
        dir.file("reversed.json", R"({"kind":"example4","pi":"0.3","pi_prime":"0.6"})");
    CHECK(cli::run({"mine", "--mechanism", clean.string(), "--grid", "7",
                    "--out", (dir.path / "clean.json").string()}) == 0);
    CHECK(cli::run({"mine", "--mechanism", reversed.string(), "--grid", "7",
                    "--out", (dir.path / "reversed.json").string()}) == 1);
}

TEST_CASE("repro lists and runs its golden scenarios") {
    CHECK(cli::run({"repro", "--list"}) == 0);
    CHECK(cli::run({"repro"}) == 0);
}

TEST_CASE("byte-identical reports regardless of worker count") {
    TempDir dir;
    const auto low_bid = dir.file("low_bid.json", kLowBidConfig);
    const auto one = dir.path / "jobs1.json";
    const auto eight = dir.path / "jobs8.json";
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "9", "--jobs", "1",
                    "--out", one.string()}) == 1);
    CHECK(cli::run({"check", "--mechanism", low_bid.string(), "--grid", "9", "--jobs", "8",
                    "--out", eight.string()}) == 1);
    CHECK(slurp(one) == slurp(eight));
}

TEST_CASE("property csv parsing expands the umbrella tokens") {
    CHECK(cli::parse_property_csv("ic,a1").size() == 2);
    CHECK(cli::parse_property_csv("lemma1") ==
          std::vector<Property>{Property::allocation_monotone, Property::payoff_envelope});
    CHECK(cli::parse_property_csv("all").size() == 12);
    CHECK(cli::parse_property_csv("ic,ic,ic").size() == 1);
    CHECK_THROWS_AS(cli::parse_property_csv("bogus"), config_error);
    CHECK_THROWS_AS(cli::parse_property_csv(""), config_error);
}
