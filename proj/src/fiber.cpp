#include "hankelbands/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hankelbands/errors.hpp"
#include "hankelbands/io.hpp"

namespace hankelbands {

FiberMatrix::FiberMatrix(Complex s, int truncation, double omega, ComplexMatrix entries)
    : s_(s), truncation_(truncation), omega_(omega), entries_(std::move(entries)) {
    const std::size_t expected = static_cast<std::size_t>(2 * truncation + 1);
    if (entries_.rows() != expected || entries_.cols() != expected)
        throw ArgumentError("FiberMatrix: entries must be (2N+1) x (2N+1)");
}

namespace fiber {
namespace {

constexpr double kPi = std::numbers::pi;

void require_truncation(const PeriodicSymbol& sym, int N) {
    if (N < 1 || N < sym.max_index()) {
        throw ArgumentError("fiber: truncation N = " + std::to_string(N) + " is below the symbol's largest index " +
                            std::to_string(sym.max_index()));
    }
    if (N > 5000) throw ArgumentError("fiber: truncation N is unreasonably large");
}

// log cosh x without overflow.
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

void require_off_lattice(Complex s, double omega, const char* where) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw ArgumentError(std::string(where) + ": spectral parameter is not finite");
    const special::LatticePoint p = special::nearest_lattice_point(s, omega);
    if (p.distance <= special::kLatticeGuard) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << ": s = (" << s.real() << ", " << s.imag() << ") is within " << special::kLatticeGuard
            << " of lattice point (" << p.z.real() << ", " << p.z.imag() << ")";
        throw DomainError(msg.str());
    }
}

std::vector<Complex> log_gamma_sequence(double omega, Complex s, int N) {
    std::vector<Complex> out(static_cast<std::size_t>(2 * N + 1));
    const Complex i(0.0, 1.0);
    for (int n = -N; n <= N; ++n) out[n + N] = special::log_gamma(0.5 + i * (omega * n + s));
    return out;
}

FiberMatrix build_fiber(const PeriodicSymbol& sym, Complex s, int N) {
    require_truncation(sym, N);
    const double omega = sym.dual_period();
    require_off_lattice(s, omega, "build_fiber");
    const Complex i(0.0, 1.0);
    const std::size_t dim = static_cast<std::size_t>(2 * N + 1);

    std::vector<Complex> row_log(dim), col_log(dim);
    for (int n = -N; n <= N; ++n) {
        row_log[n + N] = special::log_gamma(0.5 - i * omega * double(n) - i * s);
        col_log[n + N] = special::log_gamma(0.5 + i * omega * double(n) + i * s);
    }
    std::map<int, Complex> denominator;
    for (const auto& [l, c] : sym.coefficients())
        denominator[l] = special::log_gamma(Complex(1.0, -omega * l));

    ComplexMatrix entries(dim, dim);
    for (const auto& [l, c] : sym.coefficients()) {
        if (c == Complex(0.0)) continue;
        const Complex log_den = denominator[l];
        for (int n = -N; n <= N; ++n) {
            const int m = n - l;
            if (m < -N || m > N) continue;
            entries(n + N, m + N) = std::exp(row_log[n + N] + col_log[m + N] - log_den) * c;
        }
    }
    return FiberMatrix(s, N, omega, std::move(entries));
}

FiberMatrix build_fiber_factorized(const PeriodicSymbol& sym, double k, int N) {
    require_truncation(sym, N);
    const double omega = sym.dual_period();
    require_off_lattice(Complex(k, 0.0), omega, "build_fiber_factorized");
    const ModifiedCoefficients s = to_s_coefficients(sym);
    const std::vector<Complex> lg = log_gamma_sequence(omega, Complex(k, 0.0), N);
    const std::size_t dim = lg.size();

    ComplexMatrix entries(dim, dim);
    for (const auto& [l, c] : s.values) {
        if (c == Complex(0.0)) continue;
        for (int n = -N; n <= N; ++n) {
            const int m = n - l;
            if (m < -N || m > N) continue;
            entries(n + N, m + N) = std::exp(std::conj(lg[n + N]) + lg[m + N]) * c;
        }
    }
    return FiberMatrix(Complex(k, 0.0), N, omega, std::move(entries));
}

int choose_truncation(const PeriodicSymbol& sym, double k, double tol) {
    if (!(tol >= 1e-14)) throw ArgumentError("choose_truncation: tol must be at least 1e-14");
    if (!std::isfinite(k)) throw ArgumentError("choose_truncation: k must be finite");
    const double omega = sym.dual_period();
    const double weight = to_s_coefficients(sym).l1_norm();
    auto term = [&](long n) { return std::exp(std::log(kPi) - log_cosh(kPi * (omega * n + k))); };
    const double ratio = std::exp(-kPi * omega);
    auto tail = [&](int N) {
        double sum = 0.0;
        for (int side : {-1, 1}) {
            for (long j = N + 1;; ++j) {
                const double x = omega * double(side * j) + k;
                const double t = term(side * j);
                sum += t;
                // Moving away from the centre the terms are geometric with the given ratio.
                if (side * x > 0.0 && (t / (1.0 - ratio) <= 1e-17 * sum || t < 1e-300)) break;
            }
        }
        return sum * weight;
    };
    int N = sym.max_index() + 2;
    while (tail(N) >= tol) {
        ++N;
        if (N > 100000) throw NumericalError("choose_truncation: tail bound does not decrease");
    }
    return N;
}

double gronwall_derivative_check(double k, int n_lo, int n_hi, double h, double omega) {
    if (!(h >= 1e-7 && h <= 1e-3)) throw ArgumentError("gronwall_derivative_check: h must lie in [1e-7, 1e-3]");
    if (n_lo > n_hi) throw ArgumentError("gronwall_derivative_check: empty index range");
    if (!(omega > 0.0)) throw ArgumentError("gronwall_derivative_check: omega must be positive");
    auto log_g = [&](int n, double kk) { return 0.5 * (log_cosh(kPi * omega * n) - log_cosh(kPi * (omega * n + kk))); };
    double worst = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double centre = log_g(n, k);
        const double up = std::exp(log_g(n, k + h) - centre);
        const double down = std::exp(log_g(n, k - h) - centre);
        worst = std::max(worst, std::abs(up - down) / (2.0 * h));
    }
    return worst;
}

FiberMatrix build_atomic_fiber(double alpha, double T, double k, int N) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError("build_atomic_fiber: T must be positive");
    if (!(alpha >= 0.0 && alpha < T)) throw ArgumentError("build_atomic_fiber: alpha must lie in [0, T)");
    if (N < 1) throw ArgumentError("build_atomic_fiber: N must be positive");
    const double omega = 2.0 * kPi / T;
    require_off_lattice(Complex(k, 0.0), omega, "build_atomic_fiber");
    const std::vector<Complex> lg = log_gamma_sequence(omega, Complex(k, 0.0), N);
    const std::size_t dim = lg.size();
    ComplexMatrix entries(dim, dim);
    for (int n = -N; n <= N; ++n)
        for (int m = -N; m <= N; ++m) {
            const Complex phase = std::polar(1.0, alpha * omega * double(n - m));
            entries(n + N, m + N) = std::exp(std::conj(lg[n + N]) + lg[m + N]) * phase / T;
        }
    return FiberMatrix(Complex(k, 0.0), N, omega, std::move(entries));
}

void write_matrix_csv(std::ostream& out, const FiberMatrix& m) {
    const int N = m.truncation();
    out << "n,m,re,im\n";
    for (int n = -N; n <= N; ++n)
        for (int c = -N; c <= N; ++c) {
            const Complex z = m.at(n, c);
            out << n << ',' << c << ',' << io::format_double(z.real()) << ',' << io::format_double(z.imag()) << '\n';
        }
}

}  // namespace fiber
}  // namespace hankelbands
