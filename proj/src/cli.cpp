#include "damt/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "damt/config.hpp"
#include "damt/report.hpp"
#include "damt/search.hpp"
#include "damt/verify.hpp"

namespace damt::cli {

namespace {

using clock = std::chrono::steady_clock;

double elapsed_ms(clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
}

std::string trim(const std::string& text) {
    auto begin = text.find_first_not_of(" \t");
    auto end = text.find_last_not_of(" \t");
    if (begin == std::string::npos) return "";
    return text.substr(begin, end - begin + 1);
}

const std::vector<Property> kAllProperties = {
    Property::ic,
    Property::ir,
    Property::bb,
    Property::nw,
    Property::common_price,
    Property::worst_type_zero,
    Property::nonbossy,
    Property::allocation_monotone,
    Property::payoff_envelope,
    Property::trade_structure,
    Property::set_price_constancy,
    Property::value_respecting,
};

Grid resolve_grid(const Mechanism& mech, int grid_n, const std::string& grid_file) {
    if (!grid_file.empty()) {
        Grid grid = load_grid(grid_file);
        if (!(grid.shape() == mech.shape())) {
            throw dimension_error("grid file shape does not match the mechanism");
        }
        return grid;
    }
    return Grid::for_mechanism(mech, grid_n);
}

void write_document(const nlohmann::ordered_json& doc, const std::string& out_path) {
    const std::string text = render_document(doc);
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw config_error("cannot write '" + out_path + "'");
    }
    out << text;
}

std::string rat_vector_text(const std::vector<Rat>& values) {
    std::string text = "[";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) text += ", ";
        text += values[k].str();
    }
    return text + "]";
}

std::string bit_vector_text(const std::vector<std::uint8_t>& bits) {
    std::string text = "[";
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (k) text += ", ";
        text += bits[k] ? "1" : "0";
    }
    return text + "]";
}

int cmd_run(const std::string& mech_path, const std::vector<std::string>& value_texts) {
    std::ifstream in(mech_path);
    if (!in) throw config_error("cannot open '" + mech_path + "'");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw config_error("'" + mech_path + "' is not valid JSON");

    const Mechanism mech = mechanism_from_json(doc);
    const MarketShape shape = mech.shape();
    if (static_cast<int>(value_texts.size()) != shape.players()) {
        throw dimension_error("expected " + std::to_string(shape.players()) +
                              " valuations (m=" + std::to_string(shape.sellers) +
                              " sellers then n=" + std::to_string(shape.buyers) + " buyers), got " +
                              std::to_string(value_texts.size()));
    }
    ValuationProfile v;
    for (int i = 0; i < shape.sellers; ++i) v.sellers.push_back(Rat::parse(value_texts[i]));
    for (int j = 0; j < shape.buyers; ++j) {
        v.buyers.push_back(Rat::parse(value_texts[shape.sellers + j]));
    }
    validate_profile(v, shape);

    const Outcome out = mech.evaluate(v);
    std::cout << "mechanism: " << mech.name() << " (m=" << shape.sellers
              << ", n=" << shape.buyers << ")\n";
    std::cout << "profile: s = " << rat_vector_text(v.sellers)
              << "  b = " << rat_vector_text(v.buyers) << "\n";
    if (auto linear = linear_price_params_from_json(doc)) {
        const LinearPriceTrace trace = linear_price_trace(linear->first, linear->second, v);
        std::cout << "tentative_volume: " << trace.stats.tentative_volume << "\n";
        std::cout << "price: " << trace.price.str()
                  << (trace.used_fallback ? " (fallback)" : "") << "\n";
    }
    std::cout << "traders: " << trader_set_label(trader_set(out)) << "\n";
    std::cout << "p: " << bit_vector_text(out.seller_trades) << "\n";
    std::cout << "q: " << bit_vector_text(out.buyer_trades) << "\n";
    std::cout << "x: " << rat_vector_text(out.seller_receipts) << "\n";
    std::cout << "y: " << rat_vector_text(out.buyer_payments) << "\n";
    return 0;
}

int cmd_check(const std::string& mech_path, int grid_n, const std::string& grid_file,
              const std::string& properties_csv, const std::string& out_path,
              std::size_t max_violations, int jobs, const std::string& envelope_tol_text) {
    const Mechanism mech = load_mechanism(mech_path);
    const Grid grid = resolve_grid(mech, grid_n, grid_file);
    const std::vector<Property> properties = parse_property_csv(properties_csv);
    std::optional<Rat> envelope_tol;
    if (!envelope_tol_text.empty()) envelope_tol = Rat::parse(envelope_tol_text);

    CheckOptions options;
    options.jobs = jobs;
    options.max_violations = max_violations;

    Report report;
    report.mechanism_name = mech.name();
    report.mechanism_params = mech.params();
    report.grid_points = grid.points_per_player();
    report.grid_fingerprint = grid.fingerprint();
    report.profile_count = grid.profile_count();

    for (Property property : properties) {
        const auto start = clock::now();
        PropertyReport row;
        row.result = run_property_check(property, mech, grid, options, envelope_tol);
        row.wall_ms = elapsed_ms(start);
        std::cerr << property_token(property) << ": "
                  << (row.result.passed() ? "pass" : "fail (" + std::to_string(row.result.total) +
                                                         " violations)")
                  << " [" << std::fixed << std::setprecision(1) << row.wall_ms << " ms]\n";
        report.results.push_back(std::move(row));
    }

    write_document(report_to_json(report), out_path);
    return report.all_passed() ? 0 : 1;
}

int cmd_mine(const std::string& mech_path, int grid_n, const std::string& grid_file,
             const std::string& out_path, std::size_t max_violations, int jobs) {
    const Mechanism mech = load_mechanism(mech_path);
    const Grid grid = resolve_grid(mech, grid_n, grid_file);

    MineOptions options;
    options.jobs = jobs;
    const auto start = clock::now();
    std::vector<Deviation> deviations = mine_ic_failures(mech, grid, options);
    std::cerr << "mine: " << deviations.size() << " profitable deviations [" << std::fixed
              << std::setprecision(1) << elapsed_ms(start) << " ms]\n";

    DeviationReport report;
    report.mechanism_name = mech.name();
    report.mechanism_params = mech.params();
    report.grid_points = grid.points_per_player();
    report.grid_fingerprint = grid.fingerprint();
    report.profile_count = grid.profile_count();
    report.total = deviations.size();
    if (deviations.size() > max_violations) deviations.resize(max_violations);
    report.truncated = report.total > deviations.size();
    report.deviations = std::move(deviations);

    write_document(deviation_report_to_json(report), out_path);
    return report.total > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Golden scenarios behind `repro`.

struct Scenario {
    std::string name;
    std::string expectation;
    bool (*run)(std::string& why);
};

bool expect_clean(const Mechanism& mech, const Grid& grid,
                  const std::vector<Property>& properties, std::string& why) {
    for (Property property : properties) {
        const CheckResult result = run_property_check(property, mech, grid);
        if (!result.passed()) {
            why = std::string(property_token(property)) + " unexpectedly failed (" +
                  std::to_string(result.total) + " violations)";
            return false;
        }
    }
    return true;
}

bool scenario_bilateral_posted(std::string& why) {
    for (const char* price : {"0.25", "0.5", "0.75"}) {
        const Mechanism mech = make_bilateral_posted_price(Rat::parse(price));
        const Grid grid = Grid::for_mechanism(mech, 11);
        if (!expect_clean(mech, grid,
                          {Property::ic, Property::ir, Property::bb, Property::nw,
                           Property::common_price, Property::worst_type_zero, Property::nonbossy},
                          why)) {
            why = "pi=" + std::string(price) + ": " + why;
            return false;
        }
    }
    return true;
}

bool scenario_paired_prices(std::string& why) {
    const Mechanism mech = make_paired_posted_price(Rat::parse("0.3"), Rat::parse("0.6"));
    const Grid grid = Grid::for_mechanism(mech, 11);
    if (!expect_clean(mech, grid,
                      {Property::ic, Property::ir, Property::bb, Property::nw,
                       Property::worst_type_zero},
                      why)) {
        return false;
    }
    const CheckResult a1 = check_common_price(mech, grid);
    if (a1.passed()) {
        why = "a1 unexpectedly clean";
        return false;
    }
    const Rat lo = Rat::parse("0.3");
    const Rat hi = Rat::parse("0.6");
    for (const Violation& viol : a1.violations) {
        Rat a(0);
        Rat b(0);
        for (const auto& [key, value] : viol.detail) {
            if (key == "transfer_a") a = value;
            if (key == "transfer_b") b = value;
        }
        if ((a == lo && b == hi) || (a == hi && b == lo)) return true;
    }
    why = "no a1 witness with the pair prices 0.3 and 0.6";
    return false;
}

bool scenario_spread_rebate(std::string& why) {
    const Mechanism mech = make_spread_posted_price(Rat::parse("0.3"), Rat::parse("0.6"));
    const Grid grid = Grid::for_mechanism(mech, 11);
    if (!expect_clean(mech, grid,
                      {Property::ic, Property::ir, Property::bb, Property::nw,
                       Property::common_price},
                      why)) {
        return false;
    }
    const CheckResult a2 = check_worst_type_zero(mech, grid);
    bool witnessed = false;
    for (const Violation& viol : a2.violations) {
        if (viol.player && viol.player->side == Side::buyer && viol.player->index == 1) {
            for (const auto& [key, value] : viol.detail) {
                if (key == "payoff" && value == Rat::parse("0.3")) witnessed = true;
            }
        }
    }
    if (!witnessed) {
        why = "no a2 witness where the zero-value buyer nets 0.3";
        return false;
    }
    const CheckResult prop1 = check_trade_structure(mech, grid);
    for (const Violation& viol : prop1.violations) {
        if (viol.note == "no_common_price") return true;
    }
    why = "prop1 did not flag the two-price trading profile";
    return false;
}

bool scenario_low_bid_price(std::string& why) {
    const Mechanism mech = make_low_bid_price();
    const Grid grid = Grid::for_mechanism(mech, 11);
    if (!expect_clean(mech, grid,
                      {Property::ic, Property::ir, Property::bb, Property::nw,
                       Property::common_price, Property::worst_type_zero},
                      why)) {
        return false;
    }
    const CheckResult a3 = check_nonbossy(mech, grid, CheckOptions{0, 100000});
    const ValuationProfile pinned{{Rat::parse("0.3")}, {Rat::parse("0.7"), Rat::parse("0.4")}};
    bool witnessed = false;
    for (const Violation& viol : a3.violations) {
        if (viol.profile == pinned && viol.player == PlayerId{Side::buyer, 1} &&
            viol.deviation == Rat::parse("0.5") && viol.note == "b1") {
            Rat before(0);
            Rat after(0);
            for (const auto& [key, value] : viol.detail) {
                if (key == "before") before = value;
                if (key == "after") after = value;
            }
            witnessed = before == Rat::parse("0.4") && after == Rat::parse("0.5");
        }
    }
    if (!witnessed) {
        why = "no a3 witness moving buyer 1's payment from 0.4 to 0.5";
        return false;
    }
    const CheckResult prop2 = check_set_price_constancy(mech, grid);
    if (prop2.passed()) {
        why = "prop2 unexpectedly clean";
        return false;
    }
    return true;
}

bool scenario_two_tier_clean(std::string& why) {
    const Mechanism mech = make_two_tier_posted_price(Rat::parse("0.6"), Rat::parse("0.3"));
    const Grid grid = Grid::for_mechanism(mech, 11);
    return expect_clean(mech, grid,
                        {Property::ic, Property::ir, Property::bb, Property::nw,
                         Property::common_price, Property::worst_type_zero, Property::nonbossy,
                         Property::trade_structure, Property::set_price_constancy},
                        why);
}

bool scenario_two_tier_reversed(std::string& why) {
    const Mechanism mech = make_two_tier_posted_price(Rat::parse("0.3"), Rat::parse("0.6"));
    const Grid grid = Grid::for_mechanism(mech, 11);
    const auto deviations = mine_ic_failures(mech, grid);
    const Rat lo = Rat::parse("0.3");
    const Rat hi = Rat::parse("0.6");
    for (const Deviation& dev : deviations) {
        if (dev.player.side == Side::seller && dev.profile.sellers[0] < lo && dev.report >= lo &&
            dev.report < hi && dev.gain > Rat(0)) {
            return true;
        }
    }
    why = "no seller deviation with value below 0.3 and report in [0.3, 0.6)";
    return false;
}

bool scenario_rationing_golden(std::string& why) {
    const MarketShape shape{4, 4};
    LinearPriceParams params;
    params.seller_coeffs.assign(4, Rat(0));
    params.buyer_coeffs = {Rat(1), Rat(0), Rat(0), Rat(0)};
    params.seller_priority = {0, 1, 2, 3};
    params.buyer_priority = {0, 1, 2, 3};
    const ValuationProfile v{
        {Rat::parse("0.1"), Rat::parse("0.3"), Rat::parse("0.5"), Rat::parse("0.7")},
        {Rat::parse("0.9"), Rat::parse("0.8"), Rat::parse("0.6"), Rat::parse("0.4")}};
    const LinearPriceTrace trace = linear_price_trace(shape, params, v);
    if (trace.stats.tentative_volume != 3) {
        why = "tentative volume " + std::to_string(trace.stats.tentative_volume) + ", wanted 3";
        return false;
    }
    if (trace.price != Rat::parse("0.4")) {
        why = "price " + trace.price.str() + ", wanted 0.4";
        return false;
    }
    if (trace.selected.sellers != std::vector<int>{0, 1} ||
        trace.selected.buyers != std::vector<int>{0, 1}) {
        why = "traders " + trader_set_label(trace.selected) + ", wanted S{1,2}B{1,2}";
        return false;
    }
    for (int i : {0, 1}) {
        if (trace.outcome.seller_receipts[i] != Rat::parse("0.4") ||
            trace.outcome.buyer_payments[i] != Rat::parse("0.4")) {
            why = "transfers differ from 0.4";
            return false;
        }
    }
    return true;
}

Mechanism buyer_overbid_mechanism() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(1), Rat(0), Rat(0)};
    params.seller_priority = {0, 1};
    params.buyer_priority = {1, 0, 2};
    return make_linear_price({2, 3}, std::move(params));
}

Grid buyer_overbid_grid(const Mechanism& mech) {
    std::vector<Rat> axis{Rat::parse("0.05"), Rat::parse("0.1"), Rat::parse("0.3"),
                          Rat::parse("0.5"), Rat::parse("0.7"), Rat::parse("0.95")};
    return Grid::from_points(std::vector<std::vector<Rat>>(mech.shape().sellers, axis),
                             std::vector<std::vector<Rat>>(mech.shape().buyers, axis));
}

bool scenario_buyer_overbid(std::string& why) {
    const Mechanism mech = buyer_overbid_mechanism();
    const Grid grid = buyer_overbid_grid(mech);
    const CheckResult ic = check_ic(mech, grid, CheckOptions{0, 100000});
    const ValuationProfile pinned{{Rat::parse("0.05"), Rat::parse("0.5")},
                                  {Rat::parse("0.7"), Rat::parse("0.3"), Rat::parse("0.1")}};
    for (const Violation& viol : ic.violations) {
        if (viol.profile == pinned && viol.player == PlayerId{Side::buyer, 1} &&
            viol.deviation == Rat::parse("0.95")) {
            Rat truthful(0);
            Rat deviant(0);
            for (const auto& [key, value] : viol.detail) {
                if (key == "truthful_payoff") truthful = value;
                if (key == "deviation_payoff") deviant = value;
            }
            if (deviant - truthful == Rat::parse("0.2")) return true;
            why = "pinned witness found but gain is " + (deviant - truthful).str();
            return false;
        }
    }
    why = "no ic violation at the pinned profile with report 0.95";
    return false;
}

Mechanism seller_underbid_mechanism() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(1, 2), Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(0), Rat(0)};
    params.seller_priority = {1, 0, 2};
    params.buyer_priority = {0, 1};
    return make_linear_price({3, 2}, std::move(params));
}

bool scenario_seller_underbid(std::string& why) {
    const Mechanism mech = seller_underbid_mechanism();
    std::vector<Rat> axis{Rat::parse("0.05"), Rat::parse("0.2"), Rat::parse("0.3"),
                          Rat::parse("0.9"), Rat::parse("0.95")};
    const Grid grid = Grid::from_points(std::vector<std::vector<Rat>>(3, axis),
                                        std::vector<std::vector<Rat>>(2, axis));
    const auto deviations = mine_ic_failures(mech, grid);
    const ValuationProfile pinned{
        {Rat::parse("0.05"), Rat::parse("0.3"), Rat::parse("0.9")},
        {Rat::parse("0.95"), Rat::parse("0.2")}};
    for (const Deviation& dev : deviations) {
        if (dev.player.side == Side::seller && dev.profile == pinned) return true;
    }
    why = "no seller deviation at the pinned profile";
    return false;
}

const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> table = {
        {"bilateral_posted_clean", "ic ir bb nw a1 a2 a3 all clean for pi in {0.25,0.5,0.75}",
         scenario_bilateral_posted},
        {"example1_pair_prices", "clean except a1; witness prices 0.3 vs 0.6",
         scenario_paired_prices},
        {"example2_spread_rebate", "clean except a2 (zero-value buyer nets 0.3) and prop1",
         scenario_spread_rebate},
        {"example3_low_bid_price", "clean except a3 (0.4 vs 0.5 moves b1) and prop2",
         scenario_low_bid_price},
        {"example4_two_tier", "every audit clean with 0.6 over 0.3", scenario_two_tier_clean},
        {"example4_reversed", "seller deviation: value < 0.3, report in [0.3,0.6), gain > 0",
         scenario_two_tier_reversed},
        {"linear_price_rationing", "volume 3, price 0.4, S{1,2}B{1,2}, transfers 0.4",
         scenario_rationing_golden},
        {"linear_price_buyer_overbid", "report 0.95 at the pinned profile gains exactly 0.2",
         scenario_buyer_overbid},
        {"linear_price_seller_underbid", "seller deviation exists at the pinned profile",
         scenario_seller_underbid},
    };
    return table;
}

int cmd_repro(bool list_only) {
    const auto& table = scenarios();
    if (list_only) {
        for (const Scenario& scenario : table) {
            std::cout << scenario.name << "\n";
        }
        return 0;
    }
    bool all_pass = true;
    std::cout << std::left << std::setw(32) << "scenario" << std::setw(64) << "expectation"
              << "result\n";
    for (const Scenario& scenario : table) {
        std::string why;
        const bool pass = scenario.run(why);
        all_pass = all_pass && pass;
        std::cout << std::left << std::setw(32) << scenario.name << std::setw(64)
                  << scenario.expectation << (pass ? "pass" : "FAIL") << "\n";
        if (!pass) {
            std::cout << "    " << why << "\n";
        }
    }
    std::cout << (all_pass ? "all scenarios pass" : "some scenarios FAILED") << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

std::vector<Property> parse_property_csv(const std::string& csv) {
    std::vector<Property> selected;
    auto add = [&selected](Property p) {
        for (Property existing : selected) {
            if (existing == p) return;
        }
        selected.push_back(p);
    };
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        if (token == "all") {
            for (Property p : kAllProperties) add(p);
            continue;
        }
        if (token == "lemma1") {
            add(Property::allocation_monotone);
            add(Property::payoff_envelope);
            continue;
        }
        const auto property = parse_property_token(token);
        if (!property) {
            throw config_error("unknown property '" + token + "'");
        }
        add(*property);
    }
    if (selected.empty()) {
        throw config_error("no properties selected");
    }
    return selected;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"deterministic double auction mechanisms: evaluate, audit, mine deviations"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "evaluate a mechanism at one valuation profile");
    std::string run_mech;
    std::vector<std::string> run_values;
    run_cmd->add_option("--mechanism", run_mech, "mechanism config (JSON)")->required();
    run_cmd->add_option("values", run_values,
                        "valuations: m seller then n buyer decimals in [0,1]");

    auto* check_cmd = app.add_subcommand("check", "audit properties over a valuation grid");
    std::string check_mech;
    std::string check_grid_file;
    std::string check_props = "all";
    std::string check_out;
    std::string check_envelope_tol;
    int check_grid_n = 11;
    int check_jobs = 0;
    std::size_t check_max = 100;
    check_cmd->add_option("--mechanism", check_mech, "mechanism config (JSON)")->required();
    check_cmd->add_option("--grid", check_grid_n,
                          "equispaced points per player (prices auto-straddled)");
    check_cmd->add_option("--grid-file", check_grid_file, "explicit per-player grid (JSON)");
    check_cmd->add_option("--properties", check_props,
                          "csv of ic,ir,bb,nw,a1,a2,a3,lemma1,prop1,prop2,value_respecting,all");
    check_cmd->add_option("--out", check_out, "write the report here instead of stdout");
    check_cmd->add_option("--max-violations", check_max, "witnesses kept per property");
    check_cmd->add_option("--jobs", check_jobs, "worker count; 0 = all cores, 1 = serial");
    check_cmd->add_option("--envelope-tol", check_envelope_tol,
                          "envelope tolerance (decimal, at least the grid step)");

    auto* mine_cmd = app.add_subcommand("mine", "search every profile for profitable misreports");
    std::string mine_mech;
    std::string mine_grid_file;
    std::string mine_out;
    int mine_grid_n = 11;
    int mine_jobs = 0;
    std::size_t mine_max = 100;
    mine_cmd->add_option("--mechanism", mine_mech, "mechanism config (JSON)")->required();
    mine_cmd->add_option("--grid", mine_grid_n,
                         "equispaced points per player (prices auto-straddled)");
    mine_cmd->add_option("--grid-file", mine_grid_file, "explicit per-player grid (JSON)");
    mine_cmd->add_option("--out", mine_out, "write the deviation report here instead of stdout");
    mine_cmd->add_option("--max-violations", mine_max, "deviations kept in the report");
    mine_cmd->add_option("--jobs", mine_jobs, "worker count; 0 = all cores, 1 = serial");

    auto* repro_cmd = app.add_subcommand("repro", "run the built-in golden scenarios");
    bool repro_list = false;
    repro_cmd->add_flag("--list", repro_list, "print scenario names without running them");

    std::vector<const char*> argv;
    argv.push_back("damt");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) return cmd_run(run_mech, run_values);
        if (*check_cmd) {
            return cmd_check(check_mech, check_grid_n, check_grid_file, check_props, check_out,
                             check_max, check_jobs, check_envelope_tol);
        }
        if (*mine_cmd) {
            return cmd_mine(mine_mech, mine_grid_n, mine_grid_file, mine_out, mine_max, mine_jobs);
        }
        if (*repro_cmd) return cmd_repro(repro_list);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace damt::cli
