#include "hankelbands/secdet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hankelbands/errors.hpp"
#include "hankelbands/io.hpp"

namespace hankelbands::secdet {
namespace {

void require_lambda(Complex lambda) {
    if (lambda == Complex(0.0)) throw ArgumentError("secular determinant: lambda must be nonzero");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw ArgumentError("secular determinant: lambda must be finite");
}

double relative_gap(Complex x, Complex y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

IdentityCheck make_check(std::string name, Complex lhs, Complex rhs, double tol) {
    IdentityCheck c{std::move(name), lhs, rhs, relative_gap(lhs, rhs), false};
    c.passed = c.error <= tol;
    return c;
}

nlohmann::ordered_json complex_json(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

}  // namespace

Complex secular_det_matrix(const ComplexMatrix& H, Complex lambda) {
    require_lambda(lambda);
    if (!H.square()) throw ArgumentError("secular determinant: matrix is not square");
    ComplexMatrix m(H.rows(), H.cols());
    for (std::size_t i = 0; i < H.rows(); ++i)
        for (std::size_t j = 0; j < H.cols(); ++j) m(i, j) = (i == j ? 1.0 : 0.0) - H(i, j) / lambda;
    return linalg::complex_det_lu(m);
}

Complex secular_det_from_eigenvalues(std::span<const double> eigenvalues, Complex lambda) {
    require_lambda(lambda);
    Complex product = 1.0;
    for (double e : eigenvalues) product *= 1.0 - e / lambda;
    return product;
}

Complex secular_det(const PeriodicSymbol& sym, Complex s, Complex lambda, int N) {
    require_lambda(lambda);
    const FiberMatrix H = fiber::build_fiber(sym, s, N);
    const Complex lu = secular_det_matrix(H.entries(), lambda);
    if (H.real_parameter()) {
        const std::vector<double> eig = linalg::hermitian_eigvals(H.entries());
        const Complex product = secular_det_from_eigenvalues(eig, lambda);
        // Rounding in either route is relative to prod(1 + |E_j / lambda|), not to the result.
        double natural = 1.0;
        for (double e : eig) natural *= 1.0 + std::abs(e / lambda);
        const double scale = std::max({std::abs(lu), std::abs(product), 1e-3 * natural});
        if (std::abs(lu - product) > 1e-9 * scale) {
            std::ostringstream msg;
            msg << "secular_det: LU and eigenvalue product disagree by " << std::scientific
                << std::abs(lu - product) / scale << " at s = " << s.real();
            throw NumericalError(msg.str());
        }
    }
    return lu;
}

bool IdentityReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

nlohmann::ordered_json IdentityReport::to_json() const {
    nlohmann::ordered_json out;
    out["s"] = complex_json(s);
    out["lambda"] = lambda;
    out["passed"] = passed();
    out["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        out["checks"].push_back({{"name", c.name},
                                 {"lhs", complex_json(c.lhs)},
                                 {"rhs", complex_json(c.rhs)},
                                 {"relative_error", c.error},
                                 {"passed", c.passed}});
    return out;
}

IdentityReport check_identities(const PeriodicSymbol& sym, double lambda, Complex s, int N, double tol) {
    if (lambda == 0.0 || !std::isfinite(lambda)) throw ArgumentError("check_identities: lambda must be real and nonzero");
    const double omega = sym.dual_period();
    const Complex i(0.0, 1.0);
    auto delta = [&](Complex z, double lam) { return secular_det(sym, z, lam, N); };

    IdentityReport report;
    report.s = s;
    report.lambda = lambda;
    const Complex base = delta(s, lambda);
    report.checks.push_back(make_check("conjugation", std::conj(base), delta(std::conj(s), lambda), tol));
    report.checks.push_back(make_check("shift-by-i", delta(s + i, lambda), delta(s, -lambda), tol));
    report.checks.push_back(make_check("evenness", delta(-s, lambda), base, tol));
    report.checks.push_back(make_check("omega-periodicity", delta(s + omega, lambda), base, tol));

    const Complex on_axis = delta(Complex(s.real(), 0.0), lambda);
    report.checks.push_back(make_check("real-on-real-axis", on_axis, std::conj(on_axis), tol));

    const double eps = 1e-4;
    auto residue = [&](Complex pole) {
        return 0.5 * eps * (delta(pole + eps, lambda) - delta(pole - eps, lambda));
    };
    const Complex upper = residue(0.5 * i), lower = residue(-0.5 * i);
    IdentityCheck res = make_check("opposite-residues", upper, -lower, tol);
    // A vanishing residue (constant determinant) satisfies the relation trivially.
    if (std::max(std::abs(upper), std::abs(lower)) <= 1e-12 * std::max(std::abs(base), 1.0)) {
        res.error = 0.0;
        res.passed = true;
    }
    report.checks.push_back(res);
    return report;
}

std::vector<Complex> default_validation_points(double omega) {
    return {Complex(0.3, 0.2), Complex(0.11, 0.0), Complex(omega / 2 - 0.05, 0.0)};
}

AffineDetCoefficients fit_affine_in_P(const PeriodicSymbol& sym, Complex lambda, int N) {
    const auto points = default_validation_points(sym.dual_period());
    return fit_affine_in_P(sym, lambda, N, points);
}

AffineDetCoefficients fit_affine_in_P(const PeriodicSymbol& sym, Complex lambda, int N,
                                      std::span<const Complex> validation) {
    require_lambda(lambda);
    const double omega = sym.dual_period();
    const Complex zero_of_p(omega / 2, 0.5);
    AffineDetCoefficients out;
    out.lambda = lambda;
    out.b = secular_det(sym, zero_of_p, lambda, N);
    const Complex p0 = special::ref_elliptic(0.0, omega);
    if (std::abs(p0) < 1e-300) throw NumericalError("fit_affine_in_P: P(0) vanishes");
    out.a = (secular_det(sym, 0.0, lambda, N) - out.b) / p0;
    double sup_p = std::abs(p0);
    for (Complex v : validation) {
        const Complex p = special::ref_elliptic(v, omega);
        sup_p = std::max(sup_p, std::abs(p));
        const Complex fitted = out.a * p + out.b;
        out.fit_residual = std::max(out.fit_residual, std::abs(secular_det(sym, v, lambda, N) - fitted));
    }
    out.residual_scale = std::max({std::abs(out.a) * sup_p, std::abs(out.b), 1.0});
    return out;
}

double zero_consistency(const PeriodicSymbol& sym, const bands::BandBranch& branch, int N) {
    double worst = 0.0;
    for (const auto& sample : branch.samples) {
        if (sample.value == 0.0) throw ArgumentError("zero_consistency: branch value is zero");
        const FiberMatrix H = fiber::build_fiber(sym, Complex(sample.k, 0.0), N);
        worst = std::max(worst, std::abs(secular_det_matrix(H.entries(), sample.value)));
    }
    return worst;
}

Complex flat_factor(std::span<const double> flat_values, Complex lambda) {
    require_lambda(lambda);
    Complex product = 1.0;
    for (double e : flat_values) {
        if (e <= 0.0) continue;
        const Complex r = e / lambda;
        product *= 1.0 - r * r;
    }
    return product;
}

void write_secdet_csv(std::ostream& out, std::span<const SecdetRow> rows) {
    out << "s_re,s_im,lambda_re,lambda_im,det_re,det_im\n";
    for (const auto& r : rows)
        out << io::format_double(r.s.real()) << ',' << io::format_double(r.s.imag()) << ','
            << io::format_double(r.lambda.real()) << ',' << io::format_double(r.lambda.imag()) << ','
            << io::format_double(r.det.real()) << ',' << io::format_double(r.det.imag()) << '\n';
}

}  // namespace hankelbands::secdet
