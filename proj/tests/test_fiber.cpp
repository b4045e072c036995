#include <doctest.h>

#include <numbers>
#include <sstream>

#include "hankelbands/errors.hpp"
#include "hankelbands/fiber.hpp"
#include "hankelbands/linalg.hpp"
#include "hankelbands/mathieu.hpp"
#include "hankelbands/special.hpp"
#include "test_util.hpp"

using namespace hankelbands;
constexpr double kPi = std::numbers::pi;

TEST_CASE("Beta-form entries against high-precision values") {
    const auto sym = PeriodicSymbol::mathieu(0.3, 1.0);
    const auto H = fiber::build_fiber(sym, Complex(0.2, 0.1), 4);
    CHECK(rel_err(H.at(1, 0), {0.35665389652974369836, 0.11723387000630080942}) < 1e-12);
    CHECK(rel_err(H.at(0, 0), {0.79699726805185157501, -0.1442131521433795088}) < 1e-12);
    CHECK(rel_err(H.at(-2, -1), {0.050028634146935495945, 0.028550736693206766331}) < 1e-12);
    CHECK(H.at(2, 0) == Complex(0.0));
}

TEST_CASE("factorized form agrees with the Beta form and is Hermitian") {
    for (double A : {0.0, 0.7, 2.0}) {
        const auto sym = PeriodicSymbol::mathieu(A, 1.0);
        for (double k : {0.0, 0.13, 0.5}) {
            const auto beta_form = fiber::build_fiber(sym, k, 20);
            const auto factorized = fiber::build_fiber_factorized(sym, k, 20);
            const auto direct = mathieu::build_mathieu_fiber(mathieu::MathieuParams::with(A, 1.0, 20), k);
            CHECK(factorized.entries().hermitian_defect() == 0.0);
            for (int n = -20; n <= 20; ++n)
                for (int m = -20; m <= 20; ++m) {
                    const Complex want = beta_form.at(n, m);
                    const double tol = 1e-12 * std::max(std::abs(want), 1e-300);
                    CHECK(std::abs(factorized.at(n, m) - want) <= tol);
                    CHECK(std::abs(direct.at(n, m) - want) <= tol);
                }
        }
    }
}

TEST_CASE("Carleman fiber is diagonal with pi / cosh") {
    const auto H = fiber::build_fiber_factorized(PeriodicSymbol::carleman(), 0.3, 10);
    for (int n = -10; n <= 10; ++n) {
        CHECK(rel_err(H.at(n, n), kPi / std::cosh(kPi * (n + 0.3))) < 1e-13);
        if (n < 10) CHECK(H.at(n, n + 1) == Complex(0.0));
    }
}

TEST_CASE("gamma sequence and Gram matrix") {
    const auto lg = fiber::log_gamma_sequence(1.0, 0.2, 5);
    REQUIRE(lg.size() == 11);
    CHECK(rel_err(lg[5], special::log_gamma(Complex(0.5, 0.2))) < 1e-15);
    const auto G = mathieu::gamma_gram(1.0, 0.2, 5);
    for (int n = -5; n <= 5; ++n) CHECK(rel_err(G.at(n, n), kPi / std::cosh(kPi * (n + 0.2))) < 1e-13);
}

TEST_CASE("complex parameter on the pole lattice is rejected") {
    const auto sym = PeriodicSymbol::carleman();
    CHECK_THROWS_AS(fiber::build_fiber(sym, Complex(1.0, 0.5), 5), DomainError);
    CHECK_THROWS_AS(fiber::build_fiber(sym, Complex(0.0, -0.5 + 1e-7), 5), DomainError);
    CHECK_NOTHROW(fiber::build_fiber(sym, Complex(0.0, 0.49), 5));
}

TEST_CASE("truncation selection") {
    const auto sym = PeriodicSymbol::mathieu(0.5, 1.0);
    const int N = fiber::choose_truncation(sym, 0.0, 1e-12);
    CHECK(N >= 3);
    CHECK(N <= 30);
    CHECK(fiber::choose_truncation(sym, 0.0, 1e-6) <= N);
    CHECK_THROWS_AS(fiber::choose_truncation(sym, 0.0, 1e-16), ArgumentError);
    CHECK_THROWS_AS(fiber::build_fiber(PeriodicSymbol::from_nonnegative(2 * kPi, {{0, 1.0}, {4, 0.1}}), 0.0, 3),
                    ArgumentError);
}

TEST_CASE("Gronwall derivative bound is at most pi") {
    for (double k : {0.0, 0.2, 0.5, 0.9})
        CHECK(fiber::gronwall_derivative_check(k, -30, 30, 1e-5) <= kPi + 1e-6);
    CHECK(fiber::gronwall_derivative_check(0.3, -30, 30, 1e-5, 2.0) <= kPi + 1e-6);
    CHECK_THROWS_AS(fiber::gronwall_derivative_check(0.0, 0, 1, 1e-2), ArgumentError);
}

TEST_CASE("atomic measure gives a rank-one fiber") {
    const double T = 2.0 * kPi, k = 0.3;
    const auto H = fiber::build_atomic_fiber(1.1, T, k, 30);
    const auto ev = linalg::hermitian_eigvals(H.entries());
    const double s1 = std::abs(ev.back());
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) s2 = std::max(s2, std::abs(ev[i]));
    CHECK(s2 / s1 < 1e-10);
    CHECK(std::abs(s1 * T - 2.9559431853370772083) < 1e-8);
}

TEST_CASE("matrix CSV layout") {
    std::ostringstream out;
    fiber::write_matrix_csv(out, fiber::build_fiber_factorized(PeriodicSymbol::carleman(), 0.0, 1));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,m,re,im");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9);
    CHECK(out.str().find("-1,-1,") != std::string::npos);
}
