#pragma once

#include <iosfwd>
#include <vector>

#include "hankelbands/linalg.hpp"
#include "hankelbands/symbol.hpp"

namespace hankelbands {

// Truncated fiber matrix with indices n, m in [-N, N]; storage index is n + N.
class FiberMatrix {
public:
    FiberMatrix(Complex s, int truncation, double omega, ComplexMatrix entries);

    Complex s() const { return s_; }
    int truncation() const { return truncation_; }
    double omega() const { return omega_; }
    std::size_t size() const { return entries_.rows(); }
    bool real_parameter() const { return s_.imag() == 0.0; }

    const ComplexMatrix& entries() const { return entries_; }
    Complex at(int n, int m) const { return entries_(index(n), index(m)); }
    std::size_t index(int n) const { return static_cast<std::size_t>(n + truncation_); }

private:
    Complex s_;
    int truncation_;
    double omega_;
    ComplexMatrix entries_;
};

namespace fiber {

// log gamma_n(s) = log Gamma(1/2 + i (omega n + s)) for n in [-N, N].
std::vector<Complex> log_gamma_sequence(double omega, Complex s, int N);

// Beta-function form: B(1/2 - i omega n - i s, 1/2 + i omega m + i s) p_{n-m}.
FiberMatrix build_fiber(const PeriodicSymbol& sym, Complex s, int N);

// Factorized form for real k: conj(gamma_n) s_{n-m} gamma_m.
FiberMatrix build_fiber_factorized(const PeriodicSymbol& sym, double k, int N);

// Smallest N >= max|l| + 2 whose discarded diagonal weight, times sum |s_l|, is below tol.
int choose_truncation(const PeriodicSymbol& sym, double k, double tol);

// max over n in [n_lo, n_hi] of |g_n'(k)| / g_n(k) with g_n = sqrt(cosh(pi omega n) / cosh(pi (omega n + k))).
double gronwall_derivative_check(double k, int n_lo, int n_hi, double h, double omega = 1.0);

// (1/T) Gamma(1/2 - i omega n - i k) e^{i alpha omega (n - m)} Gamma(1/2 + i omega m + i k).
FiberMatrix build_atomic_fiber(double alpha, double T, double k, int N);

// Header n,m,re,im; one row per entry, row-major.
void write_matrix_csv(std::ostream& out, const FiberMatrix& m);

void require_off_lattice(Complex s, double omega, const char* where);

}  // namespace fiber
}  // namespace hankelbands
