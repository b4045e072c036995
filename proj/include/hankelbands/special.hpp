#pragma once

#include <complex>

namespace hankelbands {

using Complex = std::complex<double>;

namespace special {

// Distance below which a point counts as sitting on the pole lattice.
inline constexpr double kLatticeGuard = 1e-6;

// Principal branch of log Gamma. Throws DomainError at nonpositive integers.
Complex log_gamma(Complex z);
Complex gamma(Complex z);

// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), assembled in log space.
Complex log_beta(Complex a, Complex b);
Complex beta(Complex a, Complex b);

// Nearest point of the lattice {omega*n + i*(m + 1/2)}.
struct LatticePoint {
    long n = 0;
    long m = 0;
    Complex z;
    double distance = 0.0;
};
LatticePoint nearest_lattice_point(Complex s, double omega);

// N_P = ceil(log(4 pi / tol) / (pi omega)) + 2.
int elliptic_terms(double omega, double tol);

// P(s) = sum_n pi / cosh(pi (n omega + s)).
Complex ref_elliptic(Complex s, double omega, double tol = 1e-15);

}  // namespace special
}  // namespace hankelbands
