#pragma once

#include <map>
#include <string>
#include <string_view>

#include "hankelbands/special.hpp"

namespace hankelbands {

using CoefficientMap = std::map<int, Complex>;

// Real periodic symbol p(xi) = sum_l p_l exp(i omega l xi), omega = 2 pi / T.
class PeriodicSymbol {
public:
    // Full coefficient map; must already satisfy p_{-l} = conj(p_l).
    PeriodicSymbol(double period, CoefficientMap coefficients);

    // Only l >= 0 given; negative indices are filled in by conjugation.
    static PeriodicSymbol from_nonnegative(double period, const CoefficientMap& coefficients);
    static PeriodicSymbol carleman(double period = 2.0 * 3.14159265358979323846);
    // Normalized Mathieu case: s_0 = A, s_{+-1} = 1/2.
    static PeriodicSymbol mathieu(double A, double omega = 1.0);

    double period() const { return period_; }
    double dual_period() const { return omega_; }
    const CoefficientMap& coefficients() const { return coefficients_; }
    Complex coefficient(int l) const;
    int max_index() const;
    // sum |p_l| <l>^{1/2}
    double smoothness_weight() const;

private:
    double period_;
    double omega_;
    CoefficientMap coefficients_;
};

// s_l = p_l / Gamma(1 - i omega l).
struct ModifiedCoefficients {
    CoefficientMap values;
    Complex coefficient(int l) const;
    double l1_norm() const;
};

ModifiedCoefficients to_s_coefficients(const PeriodicSymbol& sym);
PeriodicSymbol from_s_coefficients(double period, const ModifiedCoefficients& s);

double evaluate_symbol(const PeriodicSymbol& sym, double xi);
// s(xi) = sum_l s_l exp(i omega l xi)
double evaluate_s_function(const ModifiedCoefficients& s, double omega, double xi);

// |p(log t)/t - int_0^inf exp(-lambda t) s(log(1/lambda)) d lambda|
double laplace_kernel_residual(const PeriodicSymbol& sym, double t);

// Same function p viewed as 2T-periodic.
PeriodicSymbol double_period(const PeriodicSymbol& sym);

// {"period": T, "coefficients": [{"l": 0, "re": 1.0, "im": 0.0}, ...]} with l >= 0.
PeriodicSymbol parse_symbol_json(std::string_view text);
std::string symbol_to_json(const PeriodicSymbol& sym);

}  // namespace hankelbands
