#include "hankelbands/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "hankelbands/errors.hpp"
#include "hankelbands/io.hpp"
#include "hankelbands/parallel.hpp"

namespace hankelbands::mathieu {
namespace {

using bands::Sign;

// r-th eigenvalue of a sign by decreasing modulus, 0 when absent.
double ranked(const std::vector<double>& ascending, Sign sign, int r) {
    const std::size_t n = ascending.size();
    if (static_cast<std::size_t>(r) >= n) return 0.0;
    if (sign == Sign::Positive) {
        const double v = ascending[n - 1 - r];
        return v > 0.0 ? v : 0.0;
    }
    const double v = ascending[r];
    return v < 0.0 ? v : 0.0;
}

std::vector<double> spectrum(const MathieuParams& p, double A, double k) {
    MathieuParams q = p;
    q.A = A;
    return linalg::hermitian_eigvals(build_mathieu_fiber(q, k).entries());
}

const bands::BandBranch* find_branch(const std::vector<bands::BandBranch>& branches, Sign sign, int rank) {
    for (const auto& b : branches)
        if (b.sign == sign && b.rank == rank) return &b;
    return nullptr;
}

// Largest number of disjoint blocks, starting from index 0, on which the form of H_N(k) is definite.
int certified_dimension(const FiberMatrix& H, const std::vector<Complex>& log_gamma, double A, Sign sign) {
    const double margin = sign == Sign::Positive ? 1.0 + A : 1.0 - A;
    if (!(margin > 0.0)) return 0;
    const int length = static_cast<int>(std::floor(1.0 / margin)) + 1;
    const int N = H.truncation();
    const int dim = 2 * N + 1;
    std::vector<std::vector<Complex>> vectors;
    for (int start = 0; start + length <= dim; start += length + 1) {
        std::vector<Complex> f(static_cast<std::size_t>(dim), 0.0);
        for (int i = start; i < start + length; ++i) {
            const double u = (sign == Sign::Positive || i % 2 == 0) ? 1.0 : -1.0;
            f[i] = u * std::exp(-log_gamma[i]);
        }
        vectors.push_back(std::move(f));
    }
    const ComplexMatrix& h = H.entries();
    std::vector<std::vector<Complex>> hf;
    for (const auto& f : vectors) {
        std::vector<Complex> y(static_cast<std::size_t>(dim), 0.0);
        for (int r = 0; r < dim; ++r)
            for (int c = std::max(0, r - 1); c <= std::min(dim - 1, r + 1); ++c) y[r] += h(r, c) * f[c];
        hf.push_back(std::move(y));
    }
    for (int count = static_cast<int>(vectors.size()); count > 0; --count) {
        ComplexMatrix q(static_cast<std::size_t>(count), static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j) {
                Complex acc = 0.0;
                for (int r = 0; r < dim; ++r) acc += std::conj(vectors[i][r]) * hf[j][r];
                q(i, j) = acc;
            }
        for (int i = 0; i < count; ++i) {
            q(i, i).imag(0.0);
            for (int j = i + 1; j < count; ++j) {
                const Complex avg = 0.5 * (q(i, j) + std::conj(q(j, i)));
                q(i, j) = avg;
                q(j, i) = std::conj(avg);
            }
        }
        const std::vector<double> eig = linalg::hermitian_eigvals(q);
        const bool definite = sign == Sign::Positive ? eig.front() > 0.0 : eig.back() < 0.0;
        if (definite) return count;
    }
    return 0;
}

}  // namespace

MathieuParams MathieuParams::with(double A, double omega, int N, int k_points) {
    MathieuParams p;
    p.A = A;
    p.omega = omega;
    p.N = N;
    p.k_grid = bands::half_cell_grid(omega, k_points);
    return p;
}

void MathieuParams::validate() const {
    if (!std::isfinite(A)) throw ArgumentError("mathieu: A must be finite");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ArgumentError("mathieu: omega must be positive");
    if (N < 3) throw ArgumentError("mathieu: N must be at least 3");
    if (k_grid.empty()) throw ArgumentError("mathieu: k grid is empty");
    if (!std::is_sorted(k_grid.begin(), k_grid.end())) throw ArgumentError("mathieu: k grid is not sorted");
    if (!std::is_sorted(A_grid.begin(), A_grid.end())) throw ArgumentError("mathieu: A grid is not sorted");
}

PeriodicSymbol mathieu_symbol(double A, double omega) { return PeriodicSymbol::mathieu(A, omega); }

FiberMatrix build_mathieu_fiber(const MathieuParams& p, double k) {
    if (p.N < 3) throw ArgumentError("mathieu: N must be at least 3");
    fiber::require_off_lattice(Complex(k, 0.0), p.omega, "build_mathieu_fiber");
    const int N = p.N;
    const std::vector<Complex> lg = fiber::log_gamma_sequence(p.omega, Complex(k, 0.0), N);
    const std::size_t dim = lg.size();
    ComplexMatrix entries(dim, dim);
    for (std::size_t n = 0; n < dim; ++n) {
        if (p.A != 0.0) entries(n, n) = p.A * std::exp(2.0 * lg[n].real());
        if (n + 1 < dim) {
            entries(n, n + 1) = 0.5 * std::exp(std::conj(lg[n]) + lg[n + 1]);
            entries(n + 1, n) = 0.5 * std::exp(std::conj(lg[n + 1]) + lg[n]);
        }
    }
    return FiberMatrix(Complex(k, 0.0), N, p.omega, std::move(entries));
}

FiberMatrix gamma_gram(double omega, double k, int N) {
    fiber::require_off_lattice(Complex(k, 0.0), omega, "gamma_gram");
    const std::vector<Complex> lg = fiber::log_gamma_sequence(omega, Complex(k, 0.0), N);
    ComplexMatrix entries(lg.size(), lg.size());
    for (std::size_t n = 0; n < lg.size(); ++n) entries(n, n) = std::exp(2.0 * lg[n].real());
    return FiberMatrix(Complex(k, 0.0), N, omega, std::move(entries));
}

bands::FiberBuilder fiber_builder(const MathieuParams& p) {
    return [p](double k) { return build_mathieu_fiber(p, k).entries(); };
}

std::vector<bands::BandBranch> sweep_bands(const MathieuParams& p, const bands::SweepOptions& options) {
    p.validate();
    if (options.m_top > p.N) throw ArgumentError("mathieu: m_top must not exceed N");
    return bands::sweep_with(fiber_builder(p), p.omega, p.k_grid, options);
}

std::vector<SweepRow> sweep_A(const MathieuParams& p, int m_top, unsigned threads) {
    p.validate();
    if (p.A_grid.empty()) throw ArgumentError("sweep_A: A grid is empty");
    std::vector<SweepRow> rows(p.A_grid.size());
    parallel_for(
        p.A_grid.size(),
        [&](std::size_t i) {
            MathieuParams q = p;
            q.A = p.A_grid[i];
            bands::SweepOptions options;
            options.m_top = m_top;
            options.truncate_at_floor = true;
            options.threads = 1;
            try {
                const auto branches = sweep_bands(q, options);
                rows[i].A = q.A;
                rows[i].bands = bands::band_intervals(branches);
            } catch (const TrackingError& e) {
                std::ostringstream msg;
                msg << e.what() << " (A = " << q.A << ")";
                throw TrackingError(msg.str());
            }
        },
        threads);
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "A,branch_id,sign,lo,hi,flat\n";
    for (const auto& row : rows)
        for (const auto& b : row.bands)
            out << io::format_double(row.A) << ',' << b.branch_id << ',' << bands::to_string(b.sign) << ','
                << io::format_double(b.lo) << ',' << io::format_double(b.hi) << ',' << (b.flat ? 1 : 0) << '\n';
}

double flat_objective(const MathieuParams& p, double A) {
    const std::vector<double> eig = spectrum(p, A, p.omega / 4);
    return ranked(eig, Sign::Positive, 1) + ranked(eig, Sign::Negative, 0);
}

FlatPointResult find_flat_A(const MathieuParams& p, double A_lo, double A_hi, double tol_A, double tol_flat) {
    p.validate();
    if (!(tol_A >= 1e-6)) throw ArgumentError("find_flat_A: tol_A must be at least 1e-6");
    if (!(A_lo < A_hi)) throw ArgumentError("find_flat_A: bracket must satisfy A_lo < A_hi");
    FlatPointResult r;
    r.initial_lo = A_lo;
    r.initial_hi = A_hi;
    r.k_hat = p.omega / 4;
    r.tol_flat = tol_flat;

    double lo = A_lo, hi = A_hi;
    double f_lo = flat_objective(p, lo);
    const double f_hi = flat_objective(p, hi);
    if (!(f_lo * f_hi < 0.0)) {
        std::ostringstream msg;
        msg << "find_flat_A: no sign change on [" << A_lo << ", " << A_hi << "] (f = " << f_lo << ", " << f_hi << ")";
        throw BracketError(msg.str());
    }
    while (hi - lo > tol_A) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = flat_objective(p, mid);
        ++r.iterations;
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.A_star = 0.5 * (lo + hi);

    MathieuParams q = p;
    q.A = r.A_star;
    bands::SweepOptions options;
    options.m_top = 3;
    options.tol_flat = tol_flat;
    options.truncate_at_floor = true;
    const auto branches = sweep_bands(q, options);
    const bands::BandBranch* e1 = find_branch(branches, Sign::Positive, 1);
    const bands::BandBranch* e0 = find_branch(branches, Sign::Negative, 0);
    if (!e1 || !e0) throw NumericalError("find_flat_A: E_1^+ or E_0^- is not resolved at A*");
    r.spread_e1_plus = e1->spread();
    r.spread_e0_minus = e0->spread();
    r.e1_plus_flat = bands::classify_flat(*e1, tol_flat);
    r.e0_minus_flat = bands::classify_flat(*e0, tol_flat);
    const std::vector<double> at_hat = spectrum(p, r.A_star, r.k_hat);
    r.e1_plus = ranked(at_hat, Sign::Positive, 1);
    r.e0_minus = ranked(at_hat, Sign::Negative, 0);
    for (std::size_t i = 0; i < e1->samples.size(); ++i)
        r.pair_gap = std::max(r.pair_gap, std::abs(e1->samples[i].value + e0->samples[i].value));
    return r;
}

nlohmann::ordered_json astar_json(const FlatPointResult& r) {
    nlohmann::ordered_json out;
    out["A_star"] = r.A_star;
    out["bracket"] = {r.initial_lo, r.initial_hi};
    out["final_bracket"] = {r.bracket_lo, r.bracket_hi};
    out["iterations"] = r.iterations;
    out["pair_values"] = {r.e1_plus, r.e0_minus};
    out["k_hat"] = r.k_hat;
    out["spread"] = {r.spread_e1_plus, r.spread_e0_minus};
    out["flat"] = {r.e1_plus_flat, r.e0_minus_flat};
    out["pair_gap"] = r.pair_gap;
    out["tol_flat"] = r.tol_flat;
    return out;
}

double check_A_reflection(const MathieuParams& p, double k, int m_top) {
    if (m_top < 1) throw ArgumentError("check_A_reflection: m_top must be positive");
    std::vector<double> plus = spectrum(p, p.A, k);
    std::vector<double> minus = spectrum(p, -p.A, k);
    for (double& v : plus) v = -v;
    auto by_modulus = [](double x, double y) { return std::abs(x) > std::abs(y); };
    std::stable_sort(plus.begin(), plus.end(), by_modulus);
    std::stable_sort(minus.begin(), minus.end(), by_modulus);
    const std::size_t count = std::min<std::size_t>(2 * static_cast<std::size_t>(m_top), plus.size());
    plus.resize(count);
    minus.resize(count);
    std::sort(plus.begin(), plus.end());
    std::sort(minus.begin(), minus.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) worst = std::max(worst, std::abs(plus[i] - minus[i]));
    return worst;
}

GapReport check_gap_openness(const MathieuParams& p, int top) {
    p.validate();
    GapReport report;
    const auto builder = fiber_builder(p);
    const auto spectra = bands::spectra_on_grid(builder, p.k_grid);
    bands::SweepOptions options;
    options.m_top = top;
    options.truncate_at_floor = true;
    const auto all = bands::assemble_branches(p.k_grid, spectra, options);
    const auto tracked = bands::top_by_modulus(all, top);
    report.branches = static_cast<int>(tracked.size());
    if (report.branches < top) report.violations.push_back("fewer tracked branches than requested");

    report.min_relative_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.k_grid.size(); ++i) {
        const auto& eig = spectra[i];
        for (const auto& b : tracked) {
            const double v = b.samples[i].value;
            auto it = std::lower_bound(eig.begin(), eig.end(), v);
            // Gap to the nearest other eigenvalue.
            double gap = std::numeric_limits<double>::infinity();
            std::size_t idx = static_cast<std::size_t>(it - eig.begin());
            if (idx < eig.size() && eig[idx] == v) {
                if (idx > 0) gap = std::min(gap, v - eig[idx - 1]);
                if (idx + 1 < eig.size()) gap = std::min(gap, eig[idx + 1] - v);
            }
            const double rel = gap / std::abs(v);
            report.min_relative_gap = std::min(report.min_relative_gap, rel);
            if (!(rel > 1e-6)) {
                std::ostringstream msg;
                msg << "eigenvalue " << v << " at k = " << p.k_grid[i] << " is not simple (relative gap " << rel << ")";
                report.violations.push_back(msg.str());
            }
        }
    }

    auto intervals = bands::band_intervals(tracked);
    std::sort(intervals.begin(), intervals.end(),
              [](const bands::SpectralBand& x, const bands::SpectralBand& y) { return x.lo < y.lo; });
    report.min_band_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
        const double gap = intervals[i + 1].lo - intervals[i].hi;
        report.min_band_gap = std::min(report.min_band_gap, gap);
        if (!(gap > 1e-6)) {
            std::ostringstream msg;
            msg << "bands " << intervals[i].branch_id << " and " << intervals[i + 1].branch_id << " are separated by "
                << gap;
            report.violations.push_back(msg.str());
        }
    }

    std::vector<double> reflected(p.k_grid.size()), shifted(p.k_grid.size());
    for (std::size_t i = 0; i < p.k_grid.size(); ++i) {
        reflected[i] = -p.k_grid[i];
        shifted[i] = p.k_grid[i] + p.omega;
    }
    const auto spectra_reflected = bands::spectra_on_grid(builder, reflected);
    const auto spectra_shifted = bands::spectra_on_grid(builder, shifted);
    for (std::size_t i = 0; i < p.k_grid.size(); ++i)
        for (const auto& b : tracked) {
            const double v = b.samples[i].value;
            report.max_symmetry_deviation =
                std::max({report.max_symmetry_deviation, std::abs(ranked(spectra_reflected[i], b.sign, b.rank) - v),
                          std::abs(ranked(spectra_shifted[i], b.sign, b.rank) - v)});
        }
    if (!(report.max_symmetry_deviation <= 1e-9)) {
        std::ostringstream msg;
        msg << "branches deviate from evenness or omega-periodicity by " << report.max_symmetry_deviation;
        report.violations.push_back(msg.str());
    }
    return report;
}

MonotonicityReport check_small_A_monotonicity(const MathieuParams& p, int n_top) {
    if (n_top < 1) throw ArgumentError("check_small_A_monotonicity: n_top must be positive");
    MonotonicityReport report;
    bands::SweepOptions options;
    options.m_top = n_top;
    options.truncate_at_floor = true;
    const auto branches = sweep_bands(p, options);

    report.all_decreasing = true;
    for (int r = 0; r < n_top; ++r) {
        const bands::BandBranch* b = find_branch(branches, Sign::Positive, r);
        if (!b) {
            report.all_decreasing = false;
            report.violations.push_back("positive branch " + std::to_string(r) + " is not resolved");
            continue;
        }
        report.positive.push_back(b->monotonicity);
        if (b->monotonicity != bands::Monotonicity::Decreasing) {
            report.all_decreasing = false;
            report.violations.push_back("E_" + std::to_string(r) + "^+ is " + bands::to_string(b->monotonicity));
        }
    }

    // |E_0^+| > |E_0^-| > |E_1^+| > |E_1^-| > ... over n_top - 1 pairs.
    const int pairs = std::max(1, n_top - 1);
    std::vector<const bands::BandBranch*> chain;
    for (int n = 0; n < pairs; ++n) {
        chain.push_back(find_branch(branches, Sign::Positive, n));
        chain.push_back(find_branch(branches, Sign::Negative, n));
    }
    report.order_holds = true;
    for (const auto* b : chain)
        if (!b) {
            report.order_holds = false;
            report.violations.push_back("interleaving chain has an unresolved branch");
            return report;
        }
    for (std::size_t i = 1; i + 1 < p.k_grid.size(); ++i)
        for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
            const double upper = std::abs(chain[c]->samples[i].value);
            const double lower = std::abs(chain[c + 1]->samples[i].value);
            if (!(upper > lower)) {
                report.order_holds = false;
                std::ostringstream msg;
                msg << "order breaks between positions " << c << " and " << c + 1 << " at k = " << p.k_grid[i];
                report.violations.push_back(msg.str());
            }
        }
    return report;
}

SignCounts check_sign_counts(const MathieuParams& p, double k, double floor) {
    if (!(floor >= 0.0)) throw ArgumentError("check_sign_counts: floor must be nonnegative");
    const FiberMatrix H = build_mathieu_fiber(p, k);
    const std::vector<double> eig = linalg::hermitian_eigvals(H.entries());
    SignCounts out;
    out.floor = floor;
    out.min_eigenvalue = eig.front();
    out.max_eigenvalue = eig.back();
    for (double v : eig) {
        if (v > floor) ++out.n_pos;
        if (v < -floor) ++out.n_neg;
    }
    const std::vector<Complex> lg = fiber::log_gamma_sequence(p.omega, Complex(k, 0.0), p.N);
    out.certified_pos = certified_dimension(H, lg, p.A, Sign::Positive);
    out.certified_neg = certified_dimension(H, lg, p.A, Sign::Negative);
    return out;
}

}  // namespace hankelbands::mathieu
