// Compares the serial reference scan against the OpenMP chunked scan on the
// two heaviest audits and verifies both produce identical output.

#include <chrono>
#include <cstdio>

#include "damt/mechanisms.hpp"
#include "damt/search.hpp"
#include "damt/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace damt;
using clock_type = std::chrono::steady_clock;

namespace {

double run_ms(const std::function<void()>& body) {
    const auto start = clock_type::now();
    body();
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

}  // namespace

int main() {
    LinearPriceParams params;
    params.seller_coeffs = {Rat(0), Rat(0)};
    params.buyer_coeffs = {Rat(1), Rat(0), Rat(0)};
    params.seller_priority = {0, 1};
    params.buyer_priority = {1, 0, 2};
    const Mechanism mech = make_linear_price({2, 3}, std::move(params));
    const Grid grid = Grid::uniform({2, 3}, 9);

    int workers = 1;
#ifdef _OPENMP
    workers = omp_get_max_threads();
#endif
    std::printf("grid: %llu profiles, %d workers available\n",
                static_cast<unsigned long long>(grid.profile_count()), workers);

    CheckOptions serial;
    serial.jobs = 1;
    CheckOptions parallel;
    parallel.jobs = 0;

    CheckResult ic_serial;
    CheckResult ic_parallel;
    const double ic_serial_ms = run_ms([&] { ic_serial = check_ic(mech, grid, serial); });
    const double ic_parallel_ms = run_ms([&] { ic_parallel = check_ic(mech, grid, parallel); });
    const bool ic_same = ic_serial.total == ic_parallel.total &&
                         ic_serial.violations == ic_parallel.violations;
    std::printf("check_ic   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n",
                ic_serial_ms, ic_parallel_ms, ic_serial_ms / ic_parallel_ms,
                ic_same ? "outputs identical" : "OUTPUTS DIFFER");

    std::vector<Deviation> mined_serial;
    std::vector<Deviation> mined_parallel;
    MineOptions mine_serial;
    mine_serial.jobs = 1;
    MineOptions mine_parallel;
    mine_parallel.jobs = 0;
    const double mine_serial_ms =
        run_ms([&] { mined_serial = mine_ic_failures(mech, grid, mine_serial); });
    const double mine_parallel_ms =
        run_ms([&] { mined_parallel = mine_ic_failures(mech, grid, mine_parallel); });
    const bool mine_same = mined_serial == mined_parallel;
    std::printf("mine       serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n",
                mine_serial_ms, mine_parallel_ms, mine_serial_ms / mine_parallel_ms,
                mine_same ? "outputs identical" : "OUTPUTS DIFFER");

    return ic_same && mine_same ? 0 : 1;
}
