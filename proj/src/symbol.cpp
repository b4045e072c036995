#include "hankelbands/symbol.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hankelbands/errors.hpp"

namespace hankelbands {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRealityTolerance = 1e-13;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// exp(log Gamma(1 - i omega l)), with Gamma(1) = 1 exactly.
Complex gamma_factor(double omega, int l) {
    if (l == 0) return 1.0;
    return std::exp(special::log_gamma(Complex(1.0, -omega * l)));
}

}  // namespace

PeriodicSymbol::PeriodicSymbol(double period, CoefficientMap coefficients)
    : period_(period), omega_(2.0 * kPi / period), coefficients_(std::move(coefficients)) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ArgumentError("symbol: period must be positive and finite");
    for (const auto& [l, c] : coefficients_) {
        if (!finite(c)) throw ArgumentError("symbol: coefficient " + std::to_string(l) + " is not finite");
        const double scale = std::max(std::abs(c), std::numeric_limits<double>::min());
        if (l == 0) {
            if (std::abs(c.imag()) > kRealityTolerance * scale)
                throw ArgumentError("symbol: coefficient 0 must be real");
            continue;
        }
        auto it = coefficients_.find(-l);
        const Complex partner = it == coefficients_.end() ? Complex(0.0) : it->second;
        if (std::abs(partner - std::conj(c)) > kRealityTolerance * scale) {
            throw ArgumentError("symbol: coefficients " + std::to_string(l) + " and " + std::to_string(-l) +
                                " are not complex conjugates");
        }
    }
}

PeriodicSymbol PeriodicSymbol::from_nonnegative(double period, const CoefficientMap& coefficients) {
    CoefficientMap full;
    for (const auto& [l, c] : coefficients) {
        if (l < 0) throw ArgumentError("symbol: negative index " + std::to_string(l) + " in nonnegative list");
        full[l] = c;
        if (l > 0) full[-l] = std::conj(c);
    }
    return PeriodicSymbol(period, std::move(full));
}

PeriodicSymbol PeriodicSymbol::carleman(double period) { return PeriodicSymbol(period, {{0, 1.0}}); }

PeriodicSymbol PeriodicSymbol::mathieu(double A, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ArgumentError("mathieu: omega must be positive");
    if (!std::isfinite(A)) throw ArgumentError("mathieu: A must be finite");
    ModifiedCoefficients s;
    s.values = {{-1, 0.5}, {0, A}, {1, 0.5}};
    return from_s_coefficients(2.0 * kPi / omega, s);
}

Complex PeriodicSymbol::coefficient(int l) const {
    auto it = coefficients_.find(l);
    return it == coefficients_.end() ? Complex(0.0) : it->second;
}

int PeriodicSymbol::max_index() const {
    int best = 0;
    for (const auto& [l, c] : coefficients_) best = std::max(best, std::abs(l));
    return best;
}

double PeriodicSymbol::smoothness_weight() const {
    double sum = 0.0;
    for (const auto& [l, c] : coefficients_) sum += std::abs(c) * std::pow(1.0 + double(l) * l, 0.25);
    return sum;
}

Complex ModifiedCoefficients::coefficient(int l) const {
    auto it = values.find(l);
    return it == values.end() ? Complex(0.0) : it->second;
}

double ModifiedCoefficients::l1_norm() const {
    double sum = 0.0;
    for (const auto& [l, c] : values) sum += std::abs(c);
    return sum;
}

ModifiedCoefficients to_s_coefficients(const PeriodicSymbol& sym) {
    ModifiedCoefficients out;
    const double omega = sym.dual_period();
    for (const auto& [l, c] : sym.coefficients()) {
        if (l < 0) continue;
        const Complex s = l == 0 ? c : c * std::exp(-special::log_gamma(Complex(1.0, -omega * l)));
        out.values[l] = s;
        if (l > 0 && sym.coefficients().count(-l)) out.values[-l] = std::conj(s);
    }
    return out;
}

PeriodicSymbol from_s_coefficients(double period, const ModifiedCoefficients& s) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ArgumentError("symbol: period must be positive and finite");
    const double omega = 2.0 * kPi / period;
    for (const auto& [l, c] : s.values) {
        if (l <= 0) continue;
        const Complex partner = s.coefficient(-l);
        if (std::abs(partner - std::conj(c)) > kRealityTolerance * std::max(std::abs(c), 1e-300))
            throw ArgumentError("symbol: modified coefficients " + std::to_string(l) + " and " + std::to_string(-l) +
                                " are not complex conjugates");
    }
    CoefficientMap p;
    for (const auto& [l, c] : s.values) {
        if (l < 0) {
            if (!s.values.count(-l)) p[l] = c * gamma_factor(omega, l);
            continue;
        }
        const Complex value = c * gamma_factor(omega, l);
        p[l] = value;
        if (l > 0) p[-l] = std::conj(value);
    }
    return PeriodicSymbol(period, std::move(p));
}

double evaluate_symbol(const PeriodicSymbol& sym, double xi) {
    const double omega = sym.dual_period();
    Complex sum = 0.0;
    double scale = 0.0;
    for (const auto& [l, c] : sym.coefficients()) {
        sum += c * std::exp(Complex(0.0, omega * l * xi));
        scale += std::abs(c);
    }
    if (std::abs(sum.imag()) > 1e-13 * std::max(1.0, scale))
        throw NumericalError("evaluate_symbol: imaginary part exceeds 1e-13, symbol is not real");
    return sum.real();
}

double evaluate_s_function(const ModifiedCoefficients& s, double omega, double xi) {
    Complex sum = 0.0;
    for (const auto& [l, c] : s.values) sum += c * std::exp(Complex(0.0, omega * l * xi));
    return sum.real();
}

double laplace_kernel_residual(const PeriodicSymbol& sym, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("laplace_kernel_residual: t must be positive");
    const ModifiedCoefficients s = to_s_coefficients(sym);
    const double omega = sym.dual_period();
    const double weight = std::max(s.l1_norm(), 1e-300);

    // lambda = exp(-xi); the integrand becomes exp(-t e^{-xi}) s(xi) e^{-xi}.
    // Beyond lambda = 40/t the integrand is below weight*e^{-40}; below lambda_min it
    // contributes at most weight*lambda_min.
    const double lambda_max = 40.0 / t;
    const double lambda_min = 1e-13 / std::max(weight, 1.0);
    const double xi_lo = -std::log(lambda_max);
    const double xi_hi = -std::log(lambda_min);
    const double neglected = weight * (std::exp(-40.0) / t + lambda_min);

    auto integrand = [&](double xi) {
        const double lambda = std::exp(-xi);
        return std::exp(-t * lambda) * evaluate_s_function(s, omega, xi) * lambda;
    };

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double piece = std::min(2.0, kPi / std::max(omega, 1e-3));
    double integral = 0.0, error_total = 0.0;
    for (double a = xi_lo; a < xi_hi; a += piece) {
        const double b = std::min(a + piece, xi_hi);
        double error = 0.0;
        integral += Quadrature::integrate(integrand, a, b, 15, 1e-14, &error);
        error_total += error;
    }
    if (error_total + neglected > 1e-10) {
        std::ostringstream msg;
        msg << "laplace_kernel_residual: quadrature reached only " << std::scientific << error_total + neglected;
        throw NumericalError(msg.str());
    }
    const double lhs = evaluate_symbol(sym, std::log(t)) / t;
    return std::abs(lhs - integral);
}

PeriodicSymbol double_period(const PeriodicSymbol& sym) {
    CoefficientMap doubled;
    for (const auto& [l, c] : sym.coefficients()) doubled[2 * l] = c;
    return PeriodicSymbol(2.0 * sym.period(), std::move(doubled));
}

PeriodicSymbol parse_symbol_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("symbol JSON: ") + e.what());
    }
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("symbol JSON: field '" + field + "': " + why);
    };
    if (!doc.is_object()) fail("<root>", "expected an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "period" && it.key() != "coefficients") fail(it.key(), "unknown field");
    if (!doc.contains("period")) fail("period", "missing");
    if (!doc["period"].is_number()) fail("period", "expected a number");
    const double period = doc["period"].get<double>();
    if (!(period > 0.0) || !std::isfinite(period)) fail("period", "must be positive");
    if (!doc.contains("coefficients")) fail("coefficients", "missing");
    const json& list = doc["coefficients"];
    if (!list.is_array()) fail("coefficients", "expected an array");
    if (list.empty()) fail("coefficients", "must not be empty");

    CoefficientMap coefficients;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "coefficients[" + std::to_string(i) + "]";
        const json& item = list[i];
        if (!item.is_object()) fail(path, "expected an object");
        for (auto it = item.begin(); it != item.end(); ++it)
            if (it.key() != "l" && it.key() != "re" && it.key() != "im") fail(path + "." + it.key(), "unknown field");
        for (const char* key : {"l", "re", "im"})
            if (!item.contains(key)) fail(path + "." + key, "missing");
        if (!item["l"].is_number_integer()) fail(path + ".l", "expected an integer");
        if (!item["re"].is_number()) fail(path + ".re", "expected a number");
        if (!item["im"].is_number()) fail(path + ".im", "expected a number");
        const long long l = item["l"].get<long long>();
        if (l < 0) fail(path + ".l", "must be nonnegative (negative indices follow from reality)");
        if (l > 100000) fail(path + ".l", "index too large");
        if (coefficients.count(int(l))) fail(path + ".l", "duplicate index " + std::to_string(l));
        const Complex c(item["re"].get<double>(), item["im"].get<double>());
        if (!finite(c)) fail(path, "coefficient is not finite");
        if (l == 0 && c.imag() != 0.0) fail(path + ".im", "coefficient 0 must be real");
        coefficients[int(l)] = c;
    }
    return PeriodicSymbol::from_nonnegative(period, coefficients);
}

std::string symbol_to_json(const PeriodicSymbol& sym) {
    nlohmann::json doc;
    doc["period"] = sym.period();
    doc["coefficients"] = nlohmann::json::array();
    for (const auto& [l, c] : sym.coefficients()) {
        if (l < 0) continue;
        doc["coefficients"].push_back({{"l", l}, {"re", c.real()}, {"im", c.imag()}});
    }
    return doc.dump(2);
}

}  // namespace hankelbands
