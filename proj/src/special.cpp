#include "hankelbands/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hankelbands/errors.hpp"

namespace hankelbands::special {
namespace {

constexpr double kPi = std::numbers::pi;
// Godfrey's coefficients for g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,   57.156235665862923517,    -59.597960355475491248,  14.136097974741747174,
    -0.49191381609762019978,  0.33994649984811888699e-4, 0.46523628927048575665e-4, -0.98374475304879564677e-4,
    0.15808870322491248884e-3, -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4, -0.26190838401581408670e-4, 0.36899182659531622704e-5};

constexpr double kPoleTolerance = 1e-12;

void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        std::ostringstream msg;
        msg << what << ": non-finite argument";
        throw ArgumentError(msg.str());
    }
}

void check_pole(Complex z) {
    if (z.real() > 0.5) return;
    double n = std::round(z.real());
    if (n <= 0.0 && std::abs(z - Complex(n, 0.0)) <= kPoleTolerance) {
        std::ostringstream msg;
        msg << "log_gamma: pole at z = " << static_cast<long long>(n);
        throw DomainError(msg.str());
    }
}

// Lanczos sum, valid for Re z >= 1/2.
Complex lanczos_log_gamma(Complex z) {
    Complex x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const Complex t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x) - std::log(z);
}

// log sin(pi z) for Im z >= 0, stable for large imaginary parts.
Complex log_sin_pi(Complex z) {
    double n = std::round(z.real());
    Complex w = kPi * (z - n);
    bool odd = std::fmod(std::abs(n), 2.0) == 1.0;
    Complex out;
    if (w.imag() > 20.0) {
        const Complex i(0.0, 1.0);
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        out = -i * w + std::log(Complex(0.0, 0.5)) + std::log(1.0 - std::exp(2.0 * i * w));
    } else {
        out = std::log(std::sin(w));
    }
    if (odd) out += Complex(0.0, kPi);
    return out;
}

Complex log_gamma_upper(Complex z) {
    if (z.real() >= 0.5) return lanczos_log_gamma(z);
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(kPi) - log_sin_pi(z) - lanczos_log_gamma(1.0 - z);
}

}  // namespace

Complex log_gamma(Complex z) {
    require_finite(z, "log_gamma");
    check_pole(z);
    // Evaluate in the closed upper half plane and mirror, so conjugate symmetry is exact.
    if (z.imag() < 0.0) return std::conj(log_gamma_upper(std::conj(z)));
    return log_gamma_upper(z);
}

Complex gamma(Complex z) { return std::exp(log_gamma(z)); }

Complex log_beta(Complex a, Complex b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

Complex beta(Complex a, Complex b) { return std::exp(log_beta(a, b)); }

LatticePoint nearest_lattice_point(Complex s, double omega) {
    LatticePoint p;
    p.n = std::lround(s.real() / omega);
    p.m = std::lround(s.imag() - 0.5);
    p.z = Complex(omega * static_cast<double>(p.n), static_cast<double>(p.m) + 0.5);
    p.distance = std::abs(s - p.z);
    return p;
}

int elliptic_terms(double omega, double tol) {
    return static_cast<int>(std::ceil(std::log(4.0 * kPi / tol) / (kPi * omega))) + 2;
}

Complex ref_elliptic(Complex s, double omega, double tol) {
    require_finite(s, "ref_elliptic");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ArgumentError("ref_elliptic: omega must be positive");
    if (!(tol >= 1e-15)) throw ArgumentError("ref_elliptic: tol must be at least 1e-15");
    LatticePoint pole = nearest_lattice_point(s, omega);
    if (pole.distance <= kLatticeGuard) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "ref_elliptic: s = (" << s.real() << ", " << s.imag() << ") is within " << kLatticeGuard
            << " of lattice point (" << pole.z.real() << ", " << pole.z.imag() << ")";
        throw DomainError(msg.str());
    }
    const int terms = elliptic_terms(omega, tol);
    const long centre = -pole.n;
    // Sum from the outermost terms inwards so the small contributions are not swamped.
    Complex sum = 0.0;
    for (int j = terms; j >= 1; --j) {
        for (long n : {centre - j, centre + j}) {
            sum += kPi / std::cosh(kPi * (static_cast<double>(n) * omega + s));
        }
    }
    sum += kPi / std::cosh(kPi * (static_cast<double>(centre) * omega + s));
    return sum;
}

}  // namespace hankelbands::special
