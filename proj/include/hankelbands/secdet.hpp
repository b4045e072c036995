#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hankelbands/bands.hpp"

namespace hankelbands::secdet {

// Delta(s; lambda) ~ a P(s) + b.
struct AffineDetCoefficients {
    Complex lambda;
    Complex a;
    Complex b;
    double fit_residual = 0.0;
    double residual_scale = 1.0;  // max(|a| sup|P|, |b|, 1) over the validation points
};

// det(I - H / lambda)
Complex secular_det_matrix(const ComplexMatrix& H, Complex lambda);
// prod_j (1 - E_j / lambda)
Complex secular_det_from_eigenvalues(std::span<const double> eigenvalues, Complex lambda);

// Delta_N(s; lambda) from the Beta-form fiber. For real s the LU value is cross-checked
// against the Hermitian eigenvalue product and a NumericalError is raised on disagreement.
Complex secular_det(const PeriodicSymbol& sym, Complex s, Complex lambda, int N);

struct IdentityCheck {
    std::string name;
    Complex lhs;
    Complex rhs;
    double error = 0.0;  // relative
    bool passed = false;
};

struct IdentityReport {
    Complex s;
    double lambda = 0.0;
    std::vector<IdentityCheck> checks;
    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

// Conjugation, shift by i, evenness, omega-periodicity, reality on the real axis and
// opposite residues at +-i/2.
IdentityReport check_identities(const PeriodicSymbol& sym, double lambda, Complex s, int N, double tol = 1e-8);

std::vector<Complex> default_validation_points(double omega);
AffineDetCoefficients fit_affine_in_P(const PeriodicSymbol& sym, Complex lambda, int N);
AffineDetCoefficients fit_affine_in_P(const PeriodicSymbol& sym, Complex lambda, int N,
                                      std::span<const Complex> validation);

// max over samples of |Delta(k; E(k))|
double zero_consistency(const PeriodicSymbol& sym, const bands::BandBranch& branch, int N);

// prod over positive flat values E of (1 - (E / lambda)^2)
Complex flat_factor(std::span<const double> flat_values, Complex lambda);

struct SecdetRow {
    Complex s;
    Complex lambda;
    Complex det;
};
void write_secdet_csv(std::ostream& out, std::span<const SecdetRow> rows);

}  // namespace hankelbands::secdet
