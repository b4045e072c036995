#include <doctest.h>

#include <numbers>
#include <sstream>

#include "hankelbands/bands.hpp"
#include "hankelbands/errors.hpp"
#include "hankelbands/mathieu.hpp"

using namespace hankelbands;
using namespace hankelbands::bands;
constexpr double kPi = std::numbers::pi;

namespace {

BandBranch synthetic(std::function<double(double)> f, Sign sign = Sign::Positive, int points = 41) {
    BandBranch b;
    b.sign = sign;
    for (double k : half_cell_grid(1.0, points)) b.samples.push_back({k, f(k)});
    return b;
}

}  // namespace

TEST_CASE("half-cell grid") {
    const auto g = half_cell_grid(2.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
}

TEST_CASE("Carleman sweep matches the closed form") {
    const auto grid = half_cell_grid(1.0, 101);
    SweepOptions options;
    const auto branches = sweep(PeriodicSymbol::carleman(), 40, grid, options);
    REQUIRE(branches.size() == 6);
    double worst = 0.0;
    for (const auto& b : branches) {
        CHECK(b.sign == Sign::Positive);
        CHECK_FALSE(b.flat);
        for (const auto& sample : b.samples) {
            const double want = carleman_ranked(1.0, b.rank, sample.k);
            worst = std::max(worst, std::abs(sample.value - want) / want);
        }
    }
    CHECK(worst < 1e-8);
    CHECK(branches[0].monotonicity == Monotonicity::Decreasing);
    CHECK(branches[1].monotonicity == Monotonicity::Increasing);
}

TEST_CASE("flat classification") {
    CHECK(classify_flat(synthetic([](double) { return 0.7; }), 1e-8));
    CHECK_FALSE(classify_flat(synthetic([](double k) { return 1.0 + 1e-3 * k; }), 1e-8));
    const auto branches = mathieu::sweep_bands(mathieu::MathieuParams::with(0.0), SweepOptions{});
    for (const auto& b : branches) {
        CHECK(b.flat);
        CHECK(b.monotonicity == Monotonicity::Flat);
    }
}

TEST_CASE("tracking reports ranks below the value floor") {
    SweepOptions options;
    options.m_top = 8;
    const auto grid = half_cell_grid(1.0, 41);
    CHECK_THROWS_AS(mathieu::sweep_bands(mathieu::MathieuParams::with(0.5, 1.0, 60, 41), options), TrackingError);
    options.truncate_at_floor = true;
    const auto kept = mathieu::sweep_bands(mathieu::MathieuParams::with(0.5, 1.0, 60, 41), options);
    CHECK(kept.size() >= 8);
    SweepOptions small;
    CHECK_THROWS_AS(sweep(PeriodicSymbol::carleman(), 40, half_cell_grid(1.0, 20), small), ArgumentError);
}

TEST_CASE("band intervals and disjointness") {
    const auto grid = half_cell_grid(1.0, 101);
    const auto branches = sweep(PeriodicSymbol::carleman(), 40, grid);
    const auto intervals = band_intervals(branches);
    for (const auto& b : intervals) {
        CHECK(b.lo <= b.hi);
        CHECK(b.lo > 0.0);
    }
    CHECK(intervals[0].hi == doctest::Approx(kPi).epsilon(1e-10));
    const auto report = check_disjointness(intervals);
    CHECK(report.passed());
    CHECK(report.touching_pairs == 5);

    std::vector<SpectralBand> bad = {{0, Sign::Positive, 1.0, 2.0, false}, {1, Sign::Positive, 1.5, 2.5, false}};
    CHECK(check_disjointness(bad).overlaps.size() == 1);
    std::vector<SpectralBand> reflected = {{0, Sign::Positive, 1.0, 2.0, false}, {1, Sign::Negative, -1.5, -1.2, false}};
    CHECK(check_disjointness(reflected).reflection_overlaps.size() == 1);
    std::vector<SpectralBand> lonely = {{0, Sign::Positive, 0.5, 0.5, true}};
    CHECK_FALSE(check_disjointness(lonely).passed());
}

TEST_CASE("alternation") {
    const auto grid = half_cell_grid(1.0, 101);
    const auto carleman = order_by_modulus(sweep(PeriodicSymbol::carleman(), 40, grid), true);
    CHECK(check_alternation(carleman).passed());
    const auto strong = sweep_bands(mathieu::MathieuParams::with(2.0), SweepOptions{});
    CHECK(check_alternation(order_by_modulus(strong, true)).passed());
    std::vector<BandBranch> wrong = {synthetic([](double k) { return 2.0 + k; }), synthetic([](double k) { return 1.0 - k; })};
    CHECK_FALSE(check_alternation(wrong).passed());
    const auto flat = mathieu::sweep_bands(mathieu::MathieuParams::with(0.0), SweepOptions{});
    CHECK(check_alternation(order_by_modulus(flat, true)).skipped);
}

TEST_CASE("Gronwall envelope") {
    const auto grid = half_cell_grid(1.0, 101);
    for (const auto& b : sweep(PeriodicSymbol::carleman(), 40, grid)) CHECK(gronwall_envelope_check(b));
    CHECK(gronwall_envelope_check(synthetic([](double) { return 0.3; })));
    CHECK_FALSE(gronwall_envelope_check(synthetic([](double k) { return std::exp(-4.0 * k); })));
}

TEST_CASE("period doubling") {
    CHECK(period_doubling_check(PeriodicSymbol::carleman(), 0.2, 40, 10) < 1e-9);
    CHECK(period_doubling_check(PeriodicSymbol::mathieu(0.5, 1.0), 0.2, 40, 10) < 1e-9);
}

TEST_CASE("crossings at the cell ends") {
    const auto at_zero = crossing_analysis(PeriodicSymbol::carleman(), 40, 0.0, 4);
    CHECK(at_zero.passed());
    int transversal = 0;
    for (const auto& e : at_zero.entries) transversal += e.kind == CrossingEntry::Kind::Transversal ? 1 : 0;
    CHECK(transversal == 2);
    const auto strong = crossing_analysis(PeriodicSymbol::mathieu(2.0, 1.0), 40, 0.5, 3);
    CHECK(strong.passed());
    for (const auto& e : strong.entries) CHECK(e.kind == CrossingEntry::Kind::Extremum);
}

TEST_CASE("CSV and JSON output") {
    const auto branches = sweep(PeriodicSymbol::carleman(), 20, half_cell_grid(1.0, 34));
    std::ostringstream csv;
    write_bands_csv(csv, branches);
    CHECK(csv.str().rfind("k,branch_id,sign,value\n", 0) == 0);
    const auto meta = bands_meta_json(branches);
    CHECK(meta.size() == branches.size());
    CHECK(meta["0"]["flat"] == false);
    CHECK(meta["0"]["monotonicity"] == "decreasing");
    CHECK(meta["0"]["hi"].get<double>() == doctest::Approx(kPi));
}
