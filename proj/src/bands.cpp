#include "hankelbands/bands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hankelbands/errors.hpp"
#include "hankelbands/io.hpp"
#include "hankelbands/parallel.hpp"

namespace hankelbands::bands {
namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const BandBranch& b) {
    std::ostringstream out;
    out << "branch " << b.branch_id << " (" << to_string(b.sign) << ", rank " << b.rank << ")";
    return out.str();
}

// r-th eigenvalue of the given sign ordered by decreasing modulus; 0 when absent.
double ranked(const std::vector<double>& ascending, Sign sign, int r) {
    const std::size_t n = ascending.size();
    if (sign == Sign::Positive) {
        if (static_cast<std::size_t>(r) >= n) return 0.0;
        const double v = ascending[n - 1 - r];
        return v > 0.0 ? v : 0.0;
    }
    if (static_cast<std::size_t>(r) >= n) return 0.0;
    const double v = ascending[r];
    return v < 0.0 ? v : 0.0;
}

void validate_grid(std::span<const double> grid) {
    if (grid.size() < 34) throw ArgumentError("sweep: grid needs at least 32 interior points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ArgumentError("sweep: grid contains a non-finite value");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw ArgumentError("sweep: grid must be strictly increasing");
    }
}

void validate_half_cell(std::span<const double> grid, double omega) {
    validate_grid(grid);
    const double tol = 1e-12 * omega;
    if (std::abs(grid.front()) > tol || std::abs(grid.back() - omega / 2) > tol)
        throw ArgumentError("sweep: grid must start at 0 and end at omega/2");
}

std::size_t mid_index(const BandBranch& b) { return b.samples.size() / 2; }

}  // namespace

const char* to_string(Sign s) { return s == Sign::Positive ? "+" : "-"; }

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
        case Monotonicity::Flat: return "flat";
        case Monotonicity::Mixed: return "mixed";
    }
    return "mixed";
}

const char* to_string(CrossingEntry::Kind kind) {
    switch (kind) {
        case CrossingEntry::Kind::Transversal: return "transversal";
        case CrossingEntry::Kind::Extremum: return "extremum";
        case CrossingEntry::Kind::Flat: return "flat";
        case CrossingEntry::Kind::Degenerate: return "degenerate";
    }
    return "degenerate";
}

double BandBranch::min_value() const {
    double v = samples.empty() ? 0.0 : samples.front().value;
    for (const auto& s : samples) v = std::min(v, s.value);
    return v;
}

double BandBranch::max_value() const {
    double v = samples.empty() ? 0.0 : samples.front().value;
    for (const auto& s : samples) v = std::max(v, s.value);
    return v;
}

double BandBranch::mean() const {
    if (samples.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : samples) sum += s.value;
    return sum / static_cast<double>(samples.size());
}

std::vector<double> half_cell_grid(double omega, int points) {
    if (!(omega > 0.0)) throw ArgumentError("half_cell_grid: omega must be positive");
    if (points < 2) throw ArgumentError("half_cell_grid: need at least two points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[i] = 0.5 * omega * double(i) / double(points - 1);
    grid.back() = 0.5 * omega;
    return grid;
}

std::vector<std::vector<double>> spectra_on_grid(const FiberBuilder& builder, std::span<const double> grid,
                                                 unsigned threads) {
    std::vector<std::vector<double>> spectra(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { spectra[i] = linalg::hermitian_eigvals(builder(grid[i])); },
                 threads);
    return spectra;
}

std::vector<BandBranch> assemble_branches(std::span<const double> grid, const std::vector<std::vector<double>>& spectra,
                                          const SweepOptions& options) {
    if (spectra.size() != grid.size()) throw ArgumentError("assemble_branches: grid and spectra differ in length");
    if (options.m_top < 1) throw ArgumentError("sweep: m_top must be positive");
    double top = 0.0;
    for (const auto& values : spectra)
        for (double v : values) top = std::max(top, std::abs(v));
    const double floor = options.value_floor_rel * top;

    std::vector<BandBranch> out;
    int next_id = 0;
    for (Sign sign : {Sign::Positive, Sign::Negative}) {
        for (int r = 0; r < options.m_top; ++r) {
            std::size_t below = 0;
            double first_bad_k = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(ranked(spectra[i], sign, r)) <= floor) {
                    if (below == 0) first_bad_k = grid[i];
                    ++below;
                }
            }
            if (below == grid.size() && r == 0) break;  // this sign carries no spectrum above the floor
            if (below > 0) {
                if (options.truncate_at_floor) break;
                std::ostringstream msg;
                msg << "sweep: " << to_string(sign) << " rank " << r << " drops below the value floor "
                    << std::scientific << floor << " at k = " << first_bad_k << " (m_top too deep for N)";
                throw TrackingError(msg.str());
            }
            BandBranch b;
            b.sign = sign;
            b.rank = r;
            b.branch_id = next_id++;
            b.samples.reserve(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) b.samples.push_back({grid[i], ranked(spectra[i], sign, r)});
            b.flat = classify_flat(b, options.tol_flat);
            b.monotonicity = classify_monotonicity(b, options.tol_flat);
            out.push_back(std::move(b));
        }
    }
    return out;
}

std::vector<BandBranch> sweep_with(const FiberBuilder& builder, double omega, std::span<const double> grid,
                                   const SweepOptions& options) {
    validate_half_cell(grid, omega);
    const auto spectra = spectra_on_grid(builder, grid, options.threads);
    return assemble_branches(grid, spectra, options);
}

std::vector<BandBranch> sweep(const PeriodicSymbol& sym, int N, std::span<const double> grid,
                              const SweepOptions& options) {
    if (options.m_top > N) throw ArgumentError("sweep: m_top must not exceed N");
    FiberBuilder builder = [&](double k) { return fiber::build_fiber_factorized(sym, k, N).entries(); };
    return sweep_with(builder, sym.dual_period(), grid, options);
}

bool classify_flat(const BandBranch& b, double tol_flat) {
    if (b.samples.size() < 8) throw ArgumentError("classify_flat: need at least 8 samples");
    return b.spread() < tol_flat * std::max(1.0, std::abs(b.mean()));
}

Monotonicity classify_monotonicity(const BandBranch& b, double tol_flat) {
    if (classify_flat(b, tol_flat)) return Monotonicity::Flat;
    const double trend = b.samples.back().value - b.samples.front().value;
    if (trend == 0.0) return Monotonicity::Mixed;
    for (std::size_t i = 1; i < b.samples.size(); ++i) {
        const double step = b.samples[i].value - b.samples[i - 1].value;
        if (step * trend <= 0.0) return Monotonicity::Mixed;
    }
    return trend > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
}

SpectralBand band_interval(const BandBranch& b) {
    SpectralBand band;
    band.branch_id = b.branch_id;
    band.sign = b.sign;
    band.flat = b.flat;
    if (b.flat) {
        band.lo = band.hi = b.mean();
    } else if (b.monotonicity == Monotonicity::Mixed) {
        band.lo = b.min_value();
        band.hi = b.max_value();
    } else {
        const double e0 = b.samples.front().value, e1 = b.samples.back().value;
        band.lo = std::min(e0, e1);
        band.hi = std::max(e0, e1);
    }
    return band;
}

std::vector<SpectralBand> band_intervals(std::span<const BandBranch> branches) {
    std::vector<SpectralBand> out;
    out.reserve(branches.size());
    for (const auto& b : branches) out.push_back(band_interval(b));
    return out;
}

std::vector<BandBranch> order_by_modulus(std::span<const BandBranch> branches, bool non_flat_only) {
    std::vector<BandBranch> out;
    for (const auto& b : branches)
        if (!(non_flat_only && b.flat)) out.push_back(b);
    std::stable_sort(out.begin(), out.end(), [](const BandBranch& x, const BandBranch& y) {
        return std::abs(x.samples[mid_index(x)].value) > std::abs(y.samples[mid_index(y)].value);
    });
    return out;
}

std::vector<BandBranch> top_by_modulus(std::span<const BandBranch> branches, int count) {
    std::vector<BandBranch> out = order_by_modulus(branches, false);
    if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(count));
    return out;
}

AlternationReport check_alternation(std::span<const BandBranch> ordered) {
    AlternationReport report;
    if (ordered.empty()) {
        report.skipped = true;
        return report;
    }
    for (std::size_t n = 0; n < ordered.size(); ++n) {
        const BandBranch& b = ordered[n];
        if (b.flat) {
            report.violations.push_back(describe(b) + " is flat; alternation applies to non-flat branches only");
            continue;
        }
        const double parity = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
        ++report.checked_branches;
        for (std::size_t i = 1; i + 1 < b.samples.size(); ++i) {
            const double dk = b.samples[i + 1].k - b.samples[i - 1].k;
            const double slope = (std::abs(b.samples[i + 1].value) - std::abs(b.samples[i - 1].value)) / dk;
            ++report.checked_points;
            if (!(parity * slope > 0.0)) {
                std::ostringstream msg;
                msg << describe(b) << " at position " << n << ": d|E|/dk = " << std::scientific << slope
                    << " at k = " << b.samples[i].k;
                report.violations.push_back(msg.str());
            }
        }
    }
    return report;
}

DisjointnessReport check_disjointness(std::span<const SpectralBand> bands, double touch_tol, double flat_pair_tol) {
    DisjointnessReport report;
    auto label = [](const SpectralBand& b) {
        std::ostringstream out;
        out.precision(10);
        out << "band " << b.branch_id << " [" << b.lo << ", " << b.hi << "]";
        return out.str();
    };
    for (std::size_t i = 0; i < bands.size(); ++i) {
        for (std::size_t j = i + 1; j < bands.size(); ++j) {
            const SpectralBand &x = bands[i], &y = bands[j];
            if (x.flat || y.flat) continue;
            const double scale = std::max({std::abs(x.lo), std::abs(x.hi), std::abs(y.lo), std::abs(y.hi)});
            const double overlap = std::min(x.hi, y.hi) - std::max(x.lo, y.lo);
            if (overlap > touch_tol * scale) {
                report.overlaps.push_back(label(x) + " and " + label(y) + " overlap");
            } else if (std::abs(overlap) <= touch_tol * scale) {
                ++report.touching_pairs;
            }
            if (x.sign != y.sign) {
                // -x against y
                const double reflected = std::min(-x.lo, y.hi) - std::max(-x.hi, y.lo);
                if (reflected >= -touch_tol * scale)
                    report.reflection_overlaps.push_back("reflection of " + label(x) + " meets " + label(y));
            }
        }
    }
    std::vector<bool> used(bands.size(), false);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (!bands[i].flat || bands[i].sign != Sign::Positive) continue;
        bool found = false;
        for (std::size_t j = 0; j < bands.size() && !found; ++j) {
            if (used[j] || !bands[j].flat || bands[j].sign != Sign::Negative) continue;
            const double v = bands[i].lo;
            if (std::abs(v + bands[j].lo) <= flat_pair_tol * std::max(1.0, std::abs(v))) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) report.unmatched_flat.push_back("flat " + label(bands[i]) + " has no negative partner");
    }
    for (std::size_t j = 0; j < bands.size(); ++j)
        if (bands[j].flat && bands[j].sign == Sign::Negative && !used[j])
            report.unmatched_flat.push_back("flat " + label(bands[j]) + " has no positive partner");
    return report;
}

double carleman_oracle(double omega, int n, double k) {
    const double x = kPi * (k + omega * n);
    if (std::abs(x) > 700.0) return 2.0 * kPi * std::exp(-std::abs(x));
    return kPi / std::cosh(x);
}

double carleman_ranked(double omega, int j, double k) {
    if (j < 0) throw ArgumentError("carleman_ranked: rank must be nonnegative");
    const int n = j / 2;
    return j % 2 == 0 ? carleman_oracle(omega, n, k) : carleman_oracle(omega, -(n + 1), k);
}

bool CrossingReport::passed() const {
    for (const auto& e : entries)
        if (!e.passed) return false;
    return true;
}

CrossingReport crossing_analysis(const FiberBuilder& builder, double k0, int m_top, double h, double value_floor) {
    if (!(h > 0.0)) throw ArgumentError("crossing_analysis: h must be positive");
    if (m_top < 1) throw ArgumentError("crossing_analysis: m_top must be positive");
    constexpr int kSide = 3;
    std::vector<double> ks;
    for (int j = -kSide; j <= kSide; ++j) ks.push_back(k0 + j * h);
    const auto spectra = spectra_on_grid(builder, ks, 0);
    auto value = [&](Sign sign, int r, int j) { return ranked(spectra[j + kSide], sign, r); };

    CrossingReport report;
    report.k0 = k0;
    const double share_tol = 1e-7;
    for (Sign sign : {Sign::Positive, Sign::Negative}) {
        int available = 0;
        // One extra rank so that a value shared with the first untracked rank is recognised.
        while (available < m_top + 1 && std::abs(value(sign, available, 0)) > value_floor) ++available;
        std::vector<bool> shared(static_cast<std::size_t>(available) + 1, false);
        for (int r = 0; r + 1 < available && r < m_top; ++r) {
            const double a = value(sign, r, 0), b = value(sign, r + 1, 0);
            if (std::abs(a - b) > share_tol * std::abs(a)) continue;
            shared[r] = shared[r + 1] = true;
            // One-sided second-order slopes into k > k0.
            auto slope = [&](int rank) {
                return (-3.0 * value(sign, rank, 0) + 4.0 * value(sign, rank, 1) - value(sign, rank, 2)) / (2.0 * h);
            };
            CrossingEntry e;
            e.kind = CrossingEntry::Kind::Transversal;
            e.sign = sign;
            e.rank = r;
            e.partner_rank = r + 1;
            e.value = a;
            e.slope = slope(r);
            e.partner_slope = slope(r + 1);
            const double larger = std::max(std::abs(e.slope), std::abs(e.partner_slope));
            e.passed = larger > 1e-6 * std::abs(a) && std::abs(e.slope + e.partner_slope) <= 0.05 * larger;
            if (!e.passed) e.kind = CrossingEntry::Kind::Degenerate;
            report.entries.push_back(e);
        }
        for (int r = 0; r < std::min(available, m_top); ++r) {
            if (shared[r]) continue;
            const double f0 = value(sign, r, 0), fp = value(sign, r, 1), fm = value(sign, r, -1);
            CrossingEntry e;
            e.sign = sign;
            e.rank = r;
            e.value = f0;
            e.slope = (fp - fm) / (2.0 * h);
            e.curvature = (fp - 2.0 * f0 + fm) / (h * h);
            double local_spread = 0.0;
            for (int j = -kSide; j <= kSide; ++j) local_spread = std::max(local_spread, std::abs(value(sign, r, j) - f0));
            if (local_spread <= 1e-12 * std::abs(f0)) {
                e.kind = CrossingEntry::Kind::Flat;
                e.passed = true;
            } else if (std::abs(e.slope) <= 1e-6 * std::abs(f0) && std::abs(e.curvature) >= 1e-3 * std::abs(f0)) {
                e.kind = CrossingEntry::Kind::Extremum;
                e.passed = true;
            } else {
                e.kind = CrossingEntry::Kind::Degenerate;
                e.passed = false;
            }
            report.entries.push_back(e);
        }
    }
    return report;
}

CrossingReport crossing_analysis(const PeriodicSymbol& sym, int N, double k0, int m_top, double h) {
    FiberBuilder builder = [&](double k) { return fiber::build_fiber_factorized(sym, k, N).entries(); };
    // Ranks whose value is within rounding of zero are not tracked.
    const auto centre = linalg::hermitian_eigvals(builder(k0));
    double top = 0.0;
    for (double v : centre) top = std::max(top, std::abs(v));
    return crossing_analysis(builder, k0, m_top, h, 1e-9 * top);
}

bool gronwall_envelope_check(const BandBranch& b, double rate) {
    for (const auto& s : b.samples)
        if (s.value == 0.0) return false;
    for (const auto& x : b.samples) {
        const double lx = std::log(std::abs(x.value));
        for (const auto& y : b.samples) {
            const double gap = std::abs(lx - std::log(std::abs(y.value)));
            const double allowed = rate * std::abs(x.k - y.k);
            if (gap > allowed * (1.0 + 1e-12) + 1e-12) return false;
        }
    }
    return true;
}

double period_doubling_check(const PeriodicSymbol& sym, double k, int N, int top_m) {
    if (top_m < 1) throw ArgumentError("period_doubling_check: top_m must be positive");
    const double omega = sym.dual_period();
    const PeriodicSymbol doubled = double_period(sym);
    std::vector<double> big = linalg::hermitian_eigvals(fiber::build_fiber_factorized(doubled, k, 2 * N).entries());
    std::vector<double> pool = linalg::hermitian_eigvals(fiber::build_fiber_factorized(sym, k, N).entries());
    const std::vector<double> shifted =
        linalg::hermitian_eigvals(fiber::build_fiber_factorized(sym, k + omega / 2, N).entries());
    pool.insert(pool.end(), shifted.begin(), shifted.end());

    auto by_modulus = [](double x, double y) { return std::abs(x) > std::abs(y); };
    std::stable_sort(big.begin(), big.end(), by_modulus);
    std::stable_sort(pool.begin(), pool.end(), by_modulus);
    if (static_cast<std::size_t>(top_m) > big.size()) throw ArgumentError("period_doubling_check: top_m too large");

    std::vector<bool> used(pool.size(), false);
    double worst = 0.0;
    for (int i = 0; i < top_m; ++i) {
        std::size_t best = pool.size();
        double best_gap = 0.0;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (used[j]) continue;
            const double gap = std::abs(pool[j] - big[i]);
            if (best == pool.size() || gap < best_gap) {
                best = j;
                best_gap = gap;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_gap);
    }
    return worst;
}

void write_bands_csv(std::ostream& out, std::span<const BandBranch> branches) {
    out << "k,branch_id,sign,value\n";
    for (const auto& b : branches)
        for (const auto& s : b.samples)
            out << io::format_double(s.k) << ',' << b.branch_id << ',' << to_string(b.sign) << ','
                << io::format_double(s.value) << '\n';
}

nlohmann::ordered_json bands_meta_json(std::span<const BandBranch> branches) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& b : branches) {
        const SpectralBand band = band_interval(b);
        meta[std::to_string(b.branch_id)] = {{"flat", b.flat},
                                             {"monotonicity", to_string(b.monotonicity)},
                                             {"lo", band.lo},
                                             {"hi", band.hi},
                                             {"sign", to_string(b.sign)},
                                             {"rank", b.rank}};
    }
    return meta;
}

}  // namespace hankelbands::bands
