#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "hankelbands/errors.hpp"
#include "hankelbands/linalg.hpp"
#include "test_util.hpp"

using namespace hankelbands;

namespace {

ComplexMatrix random_hermitian(std::size_t n, unsigned seed, double grading = 0.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = normal(rng);
        for (std::size_t j = 0; j < i; ++j) {
            m(i, j) = Complex(normal(rng), normal(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    if (grading > 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) *= std::exp(-grading * double(i + j));
    }
    return m;
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

// Cyclic complex Jacobi, an independent reference in plain code.
std::vector<double> jacobi_eigenvalues(ComplexMatrix a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off < 1e-30 * std::max(1.0, std::norm(a.max_abs()))) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const Complex phase = apq / r;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * r, aqq - app);
                const double c = std::cos(theta), s = std::sin(theta);
                // A <- G^H A G with G = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * std::conj(phase) * akq;
                    a(k, q) = s * akp + c * std::conj(phase) * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace

TEST_CASE("Hermitian eigenvalues agree with Eigen and with Jacobi") {
    for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
        const auto m = random_hermitian(n, 7 + unsigned(n));
        const auto ours = linalg::hermitian_eigvals(m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
        const auto jacobi = jacobi_eigenvalues(m);
        const double scale = m.max_abs() * double(n);
        REQUIRE(ours.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(ours[i] - solver.eigenvalues()[Eigen::Index(i)]) < 1e-12 * scale);
            CHECK(std::abs(ours[i] - jacobi[i]) < 1e-12 * scale);
        }
    }
}

TEST_CASE("eigenvectors are orthonormal and diagonalize") {
    const auto m = random_hermitian(30, 99);
    const auto dec = linalg::hermitian_eigh(m);
    const auto& v = dec.eigenvectors;
    const ComplexMatrix gram = v.adjoint() * v;
    CHECK(frobenius_norm(gram - ComplexMatrix::identity(30)) < 1e-12);
    ComplexMatrix d(30, 30);
    for (std::size_t i = 0; i < 30; ++i) d(i, i) = dec.eigenvalues[i];
    CHECK(frobenius_norm(m * v - v * d) < 1e-11 * frobenius_norm(m));
    CHECK(std::is_sorted(dec.eigenvalues.begin(), dec.eigenvalues.end()));
}

TEST_CASE("strongly graded matrices converge") {
    const auto m = random_hermitian(121, 3, 0.35);
    const auto ours = linalg::hermitian_eigvals(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < ours.size(); ++i)
        CHECK(std::abs(ours[i] - solver.eigenvalues()[Eigen::Index(i)]) < 1e-13 * m.max_abs());
}

TEST_CASE("non-Hermitian input is rejected") {
    auto m = random_hermitian(4, 1);
    m(0, 1) += 1e-6;
    CHECK_THROWS_AS(linalg::hermitian_eigh(m), ArgumentError);
    CHECK_THROWS_AS(linalg::hermitian_eigh(ComplexMatrix(2, 3)), ArgumentError);
}

TEST_CASE("LU determinant agrees with Eigen") {
    std::mt19937 rng(5);
    std::normal_distribution<double> normal;
    for (std::size_t n : {1u, 3u, 12u, 31u}) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
        const Complex ours = linalg::complex_det_lu(m);
        const Complex want = to_eigen(m).partialPivLu().determinant();
        CHECK(rel_err(ours, want) < 1e-11);
        const auto log_det = linalg::complex_log_det_lu(m);
        CHECK(std::abs(log_det.log_abs - std::log(std::abs(want))) < 1e-11);
    }
    ComplexMatrix singular(3, 3);
    singular(0, 0) = 1.0;
    CHECK(linalg::complex_log_det_lu(singular).singular);
    CHECK(linalg::complex_det_lu(singular) == Complex(0.0));
}
