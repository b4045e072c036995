#include <doctest.h>

#include <numbers>

#include "hankelbands/errors.hpp"
#include "hankelbands/special.hpp"
#include "test_util.hpp"

using namespace hankelbands;
using special::log_gamma;
using special::ref_elliptic;

TEST_CASE("log gamma against high-precision values") {
    CHECK(rel_err(log_gamma(0.5), 0.57236494292470008707) < 1e-14);
    CHECK(rel_err(special::gamma({0.3, 2.0}), {0.05746533756958803346, -0.074984912582646138176}) < 1e-13);
    CHECK(rel_err(log_gamma({40.0, 180.0}), {-76.390104872014823701, 812.47901269340286947}) < 1e-14);
    CHECK(rel_err(log_gamma({10.0, 150.0}), {-187.09314941635091904, 616.21750334506300343}) < 1e-14);
    CHECK(rel_err(special::gamma({-2.7, 0.4}), {-0.42601364816873742892, 0.036482419059879668823}) < 1e-13);
    CHECK(rel_err(special::gamma({-49.5, 0.2}), {4.3150173806127497572e-64, 4.2892930321103630006e-64}) < 1e-12);
}

TEST_CASE("gamma at integers and conjugate symmetry") {
    double factorial = 1.0;
    for (int n = 1; n <= 20; ++n) {
        CHECK(rel_err(special::gamma(Complex(n)), factorial) < 1e-14);
        factorial *= n;
    }
    for (Complex z : {Complex(0.3, 2.0), Complex(-3.2, 7.5), Complex(12.0, 0.25)})
        CHECK(special::gamma(std::conj(z)) == std::conj(special::gamma(z)));
    // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
    for (double y : {0.0, 0.7, 3.0, 25.0}) {
        const double lhs = std::norm(special::gamma({0.5, y}));
        CHECK(std::abs(lhs / (std::numbers::pi / std::cosh(std::numbers::pi * y)) - 1.0) < 1e-13);
    }
}

TEST_CASE("gamma poles are domain errors") {
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-3.0), DomainError);
    CHECK_NOTHROW(log_gamma({-3.0, 1e-6}));
}

TEST_CASE("beta function") {
    CHECK(rel_err(special::beta({0.3, 0.7}, {1.2, -0.4}), {0.37418478497413218804, -0.80970412898439524536}) < 1e-13);
    CHECK(rel_err(special::beta(2.0, 3.0), 1.0 / 12.0) < 1e-14);
}

TEST_CASE("reference elliptic function values") {
    CHECK(rel_err(ref_elliptic(0.0, 1.0), 3.7081493546027438369) < 1e-13);
    CHECK(rel_err(ref_elliptic(0.0, 2.0), 3.1651034544474318237) < 1e-13);
    CHECK(rel_err(ref_elliptic(0.3, 1.0), 2.9559431853370772083) < 1e-13);
    CHECK(rel_err(ref_elliptic({0.2, 0.3}, 1.0), {3.2012826494292811085, -1.8365796425738211645}) < 1e-13);
    CHECK(rel_err(ref_elliptic({0.1, 0.45}, 0.7), {4.3489742978380708582, -7.3246014033881445173}) < 1e-12);
}

TEST_CASE("reference elliptic function identities") {
    const Complex i(0.0, 1.0);
    for (double omega : {0.5, 1.0, 2.0}) {
        for (Complex s : {Complex(0.13, 0.21), Complex(-0.4, 0.05), Complex(1.7, -0.33)}) {
            const Complex p = ref_elliptic(s, omega);
            CHECK(std::abs(ref_elliptic(-s, omega) - p) < 1e-10 * std::abs(p));
            CHECK(std::abs(ref_elliptic(s + omega, omega) - p) < 1e-10 * std::abs(p));
            CHECK(std::abs(ref_elliptic(s + i, omega) + p) < 1e-10 * std::abs(p));
        }
        CHECK(std::abs(ref_elliptic(Complex(omega / 2, 0.5), omega)) < 1e-10);
    }
    // residue of the pole at i/2 is -i
    for (Complex dir : {Complex(1.0), i, Complex(-1.0), -i}) {
        const Complex eps = 1e-5 * dir;
        CHECK(std::abs(eps * ref_elliptic(0.5 * i + eps, 1.0) + i) < 1e-4);
    }
}

TEST_CASE("reference elliptic function is decreasing on the half cell") {
    double previous = ref_elliptic(0.0, 1.0).real();
    for (int j = 1; j < 200; ++j) {
        const double value = ref_elliptic(0.5 * j / 199.0, 1.0).real();
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("reference elliptic function input checks") {
    CHECK_THROWS_AS(ref_elliptic(Complex(0.0, 0.5), 1.0), DomainError);
    CHECK_THROWS_AS(ref_elliptic(Complex(1.0, 0.5 + 1e-8), 1.0), DomainError);
    CHECK_THROWS_AS(ref_elliptic(0.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(ref_elliptic(0.0, 1.0, 1e-17), ArgumentError);
    CHECK(special::elliptic_terms(1.0, 1e-15) == int(std::ceil(std::log(4.0 * std::numbers::pi / 1e-15) / std::numbers::pi)) + 2);
    const auto nearest = special::nearest_lattice_point(Complex(2.1, -0.4), 1.0);
    CHECK(nearest.n == 2);
    CHECK(nearest.m == -1);
}
