#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hankelbands/bands.hpp"

namespace hankelbands::mathieu {

// Normalized Mathieu symbol s(xi) = A + cos(omega xi).
struct MathieuParams {
    double A = 0.0;
    double omega = 1.0;
    int N = 60;
    std::vector<double> k_grid;  // over [0, omega/2]
    std::vector<double> A_grid;  // used by sweep_A

    // Defaults: 101-point half-cell grid, empty A grid.
    static MathieuParams with(double A, double omega = 1.0, int N = 60, int k_points = 101);
    void validate() const;
};

PeriodicSymbol mathieu_symbol(double A, double omega);

// M[gamma]^* S(A) M[gamma], S tri-diagonal with A on the diagonal and 1/2 beside it.
FiberMatrix build_mathieu_fiber(const MathieuParams& p, double k);
// M[gamma]^* M[gamma] = diag(pi / cosh(pi (omega n + k)))
FiberMatrix gamma_gram(double omega, double k, int N);

bands::FiberBuilder fiber_builder(const MathieuParams& p);
std::vector<bands::BandBranch> sweep_bands(const MathieuParams& p, const bands::SweepOptions& options);

struct SweepRow {
    double A = 0.0;
    std::vector<bands::SpectralBand> bands;
};
// Band intervals of the top m_top branches per sign for every A in p.A_grid.
std::vector<SweepRow> sweep_A(const MathieuParams& p, int m_top, unsigned threads = 0);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct FlatPointResult {
    double A_star = 0.0;
    double bracket_lo = 0.0;  // final bracket
    double bracket_hi = 0.0;
    double initial_lo = 0.0;
    double initial_hi = 0.0;
    int iterations = 0;
    double k_hat = 0.0;
    double e1_plus = 0.0;   // E_1^+(k_hat; A*)
    double e0_minus = 0.0;  // E_0^-(k_hat; A*)
    double spread_e1_plus = 0.0;
    double spread_e0_minus = 0.0;
    bool e1_plus_flat = false;
    bool e0_minus_flat = false;
    double pair_gap = 0.0;  // max_k |E_1^+ + E_0^-|
    double tol_flat = 1e-6;
    bool passed() const { return e1_plus_flat && e0_minus_flat && pair_gap <= tol_flat; }
};

// f(A) = E_1^+(omega/4; A) + E_0^-(omega/4; A)
double flat_objective(const MathieuParams& p, double A);
// Bisection on f over [A_lo, A_hi] to width tol_A, then a flatness check at the midpoint.
FlatPointResult find_flat_A(const MathieuParams& p, double A_lo, double A_hi, double tol_A = 1e-6,
                            double tol_flat = 1e-6);
nlohmann::ordered_json astar_json(const FlatPointResult& r);

// Max deviation between the spectrum of H(k; -A) and minus that of H(k; A), top 2 m_top moduli.
double check_A_reflection(const MathieuParams& p, double k, int m_top);

struct GapReport {
    int branches = 0;
    double min_relative_gap = 0.0;  // tracked eigenvalue vs its spectral neighbours
    double min_band_gap = 0.0;      // between consecutive band intervals
    double max_symmetry_deviation = 0.0;  // E(-k), E(k + omega) against E(k)
    std::vector<std::string> violations;
    bool passed() const { return violations.empty(); }
};
GapReport check_gap_openness(const MathieuParams& p, int top = 6);

struct MonotonicityReport {
    std::vector<bands::Monotonicity> positive;  // top positive branches
    bool all_decreasing = false;
    bool order_holds = false;  // |E_0^+| > |E_0^-| > |E_1^+| > |E_1^-| > ...
    std::vector<std::string> violations;
    bool passed() const { return all_decreasing && order_holds; }
};
MonotonicityReport check_small_A_monotonicity(const MathieuParams& p, int n_top = 3);

struct SignCounts {
    int n_pos = 0;  // eigenvalues above floor
    int n_neg = 0;  // eigenvalues below -floor
    double floor = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    // Dimensions of explicit subspaces on which the quadratic form of H_N(k) is
    // positive (negative) definite; each is a lower bound for the count of that sign.
    int certified_pos = 0;
    int certified_neg = 0;
};
SignCounts check_sign_counts(const MathieuParams& p, double k = 0.0, double floor = 1e-6);

}  // namespace hankelbands::mathieu
