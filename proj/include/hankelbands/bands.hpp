#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hankelbands/fiber.hpp"

namespace hankelbands::bands {

enum class Sign { Positive, Negative };
// Mixed only appears when finite differences disagree with the endpoint trend.
enum class Monotonicity { Increasing, Decreasing, Flat, Mixed };

const char* to_string(Sign s);
const char* to_string(Monotonicity m);

struct BandSample {
    double k;
    double value;
};

struct BandBranch {
    int branch_id = 0;
    Sign sign = Sign::Positive;
    int rank = 0;  // 0 = largest |E| within its sign
    std::vector<BandSample> samples;
    bool flat = false;
    Monotonicity monotonicity = Monotonicity::Mixed;

    double min_value() const;
    double max_value() const;
    double spread() const { return max_value() - min_value(); }
    double mean() const;
};

struct SpectralBand {
    int branch_id = 0;
    Sign sign = Sign::Positive;
    double lo = 0.0;
    double hi = 0.0;
    bool flat = false;
};

// Uniform grid on [0, omega/2] including both endpoints.
std::vector<double> half_cell_grid(double omega, int points);

struct SweepOptions {
    int m_top = 6;                 // branches per sign
    double value_floor_rel = 1e-9; // relative to the largest |eigenvalue| on the grid
    double tol_flat = 1e-8;
    bool truncate_at_floor = false;  // drop ranks that reach the floor instead of failing
    unsigned threads = 0;            // 0: HANKELBANDS_THREADS or hardware concurrency
};

// Returns a Hermitian matrix for real k.
using FiberBuilder = std::function<ComplexMatrix(double)>;

// Ascending spectra at every grid point, computed concurrently.
std::vector<std::vector<double>> spectra_on_grid(const FiberBuilder& builder, std::span<const double> grid,
                                                 unsigned threads = 0);

// Rank-threaded branches from precomputed spectra.
std::vector<BandBranch> assemble_branches(std::span<const double> grid, const std::vector<std::vector<double>>& spectra,
                                          const SweepOptions& options);

std::vector<BandBranch> sweep(const PeriodicSymbol& sym, int N, std::span<const double> grid,
                              const SweepOptions& options = {});
std::vector<BandBranch> sweep_with(const FiberBuilder& builder, double omega, std::span<const double> grid,
                                   const SweepOptions& options);

bool classify_flat(const BandBranch& b, double tol_flat);
Monotonicity classify_monotonicity(const BandBranch& b, double tol_flat);
SpectralBand band_interval(const BandBranch& b);
std::vector<SpectralBand> band_intervals(std::span<const BandBranch> branches);

// Branches sorted by decreasing |E| at the grid midpoint; flat ones removed when requested.
std::vector<BandBranch> order_by_modulus(std::span<const BandBranch> branches, bool non_flat_only);
// The count branches of largest |E| at the grid midpoint, across both signs.
std::vector<BandBranch> top_by_modulus(std::span<const BandBranch> branches, int count);

struct AlternationReport {
    bool skipped = false;
    int checked_branches = 0;
    int checked_points = 0;
    std::vector<std::string> violations;
    bool passed() const { return violations.empty(); }
};
// Expects non-flat branches ordered by decreasing |E|; checks (-1)^{n+1} d|E_n|/dk > 0 inside the cell.
AlternationReport check_alternation(std::span<const BandBranch> ordered);

struct DisjointnessReport {
    int touching_pairs = 0;
    std::vector<std::string> overlaps;
    std::vector<std::string> reflection_overlaps;
    std::vector<std::string> unmatched_flat;
    bool passed() const { return overlaps.empty() && reflection_overlaps.empty() && unmatched_flat.empty(); }
};
DisjointnessReport check_disjointness(std::span<const SpectralBand> bands, double touch_tol = 1e-9,
                                      double flat_pair_tol = 1e-9);

// pi / cosh(pi (k + omega n))
double carleman_oracle(double omega, int n, double k);
// Ranked Carleman value: j = 2n uses index n, j = 2n+1 uses index -(n+1).
double carleman_ranked(double omega, int j, double k);

struct CrossingEntry {
    enum class Kind { Transversal, Extremum, Flat, Degenerate };
    Kind kind = Kind::Degenerate;
    Sign sign = Sign::Positive;
    int rank = 0;
    int partner_rank = -1;  // second rank of a shared value
    double value = 0.0;
    double slope = 0.0;          // one-sided slope of rank, or central slope for an extremum
    double partner_slope = 0.0;  // one-sided slope of partner_rank
    double curvature = 0.0;
    bool passed = false;
};
const char* to_string(CrossingEntry::Kind kind);

struct CrossingReport {
    double k0 = 0.0;
    std::vector<CrossingEntry> entries;
    bool passed() const;
};
CrossingReport crossing_analysis(const FiberBuilder& builder, double k0, int m_top, double h = 1e-3,
                                 double value_floor = 0.0);
CrossingReport crossing_analysis(const PeriodicSymbol& sym, int N, double k0, int m_top, double h = 1e-3);

// |E(k*)| e^{-rate |k-k*|} <= |E(k)| <= |E(k*)| e^{rate |k-k*|} for all sample pairs.
bool gronwall_envelope_check(const BandBranch& b, double rate = 3.14159265358979323846);

// Max deviation between the top_m |eigenvalues| of the 2T-periodic fiber at k and the
// greedily matched union of the spectra at k and k + omega/2.
double period_doubling_check(const PeriodicSymbol& sym, double k, int N, int top_m);

void write_bands_csv(std::ostream& out, std::span<const BandBranch> branches);
nlohmann::ordered_json bands_meta_json(std::span<const BandBranch> branches);

}  // namespace hankelbands::bands
