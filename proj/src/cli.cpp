#include "hankelbands/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "hankelbands/bands.hpp"
#include "hankelbands/errors.hpp"
#include "hankelbands/io.hpp"
#include "hankelbands/mathieu.hpp"
#include "hankelbands/secdet.hpp"

namespace hankelbands::cli {
namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "': " + ec.message());
    const std::filesystem::path path = std::filesystem::path(cfg.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const ordered_json& doc) {
    auto out = open_output(cfg, name);
    out << doc.dump(2) << '\n';
}

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("cannot parse " + what + " '" + text + "'");
    return v;
}

std::vector<double> interior_grid(const RunConfig& cfg, double omega) { return bands::half_cell_grid(omega, cfg.grid); }

// One entry of the verification report.
struct Check {
    std::string name;
    std::string status;  // pass, fail, skip
    std::string detail;
};

std::string sci(double v) {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific << v;
    return out.str();
}

Check verdict(std::string name, bool ok, std::string detail) {
    return {std::move(name), ok ? "pass" : "fail", std::move(detail)};
}

}  // namespace

Complex parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return {parse_number(text, "complex value"), 0.0};
    return {parse_number(text.substr(0, comma), "real part"), parse_number(text.substr(comma + 1), "imaginary part")};
}

bool RunConfig::is_builtin_mathieu() const {
    return source.kind == SymbolSource::Kind::Builtin && source.text.rfind("mathieu:", 0) == 0;
}

double RunConfig::mathieu_A() const {
    if (!is_builtin_mathieu()) throw ConfigError("symbol is not a mathieu builtin");
    return parse_number(source.text.substr(8), "mathieu parameter A");
}

double RunConfig::resolved_omega() const {
    if (omega && period && std::abs(*omega * *period - 2.0 * kPi) > 1e-12 * 2.0 * kPi)
        throw ConfigError("--omega and --period disagree (omega * period must equal 2 pi)");
    if (omega) return *omega;
    if (period) return 2.0 * kPi / *period;
    if (source.kind == SymbolSource::Kind::File || source.kind == SymbolSource::Kind::InlineJson)
        return symbol().dual_period();
    return 1.0;
}

PeriodicSymbol RunConfig::symbol() const {
    auto rescale = [&](const PeriodicSymbol& sym) {
        double T = sym.period();
        if (omega) T = 2.0 * kPi / *omega;
        if (period) T = *period;
        return T == sym.period() ? sym : PeriodicSymbol(T, sym.coefficients());
    };
    switch (source.kind) {
        case SymbolSource::Kind::None:
            throw ConfigError("no symbol source: use --symbol or --builtin");
        case SymbolSource::Kind::InlineJson:
            return rescale(parse_symbol_json(source.text));
        case SymbolSource::Kind::File:
            return rescale(parse_symbol_json(read_file(source.text)));
        case SymbolSource::Kind::Builtin: {
            double w = 1.0;
            if (omega) w = *omega;
            if (period) w = 2.0 * kPi / *period;
            if (!(w > 0.0)) throw ConfigError("omega must be positive");
            if (source.text == "carleman") return PeriodicSymbol::carleman(2.0 * kPi / w);
            if (is_builtin_mathieu()) return PeriodicSymbol::mathieu(mathieu_A(), w);
            throw ConfigError("unknown builtin '" + source.text + "' (expected carleman or mathieu:A)");
        }
    }
    throw ConfigError("invalid symbol source");
}

int RunConfig::truncation(const PeriodicSymbol& sym) const {
    if (n) {
        if (*n < std::max(1, sym.max_index())) throw ConfigError("--n is below the symbol's largest index");
        return *n;
    }
    if (!tol && is_builtin_mathieu()) return std::max(60, m_top);
    const double t = tol.value_or(1e-12);
    const double w = sym.dual_period();
    int N = 0;
    for (double k : {0.0, w / 4, w / 2}) N = std::max(N, fiber::choose_truncation(sym, k, t));
    return std::max(N, m_top);
}

void RunConfig::validate() const {
    if (omega && period && std::abs(*omega * *period - 2.0 * kPi) > 1e-12 * 2.0 * kPi)
        throw ConfigError("--omega and --period disagree (omega * period must equal 2 pi)");
    if (grid < 34) throw ConfigError("--grid must be at least 34 (32 interior points)");
    if (m_top < 1) throw ConfigError("--m-top must be positive");
    if (!(tol_flat > 0.0)) throw ConfigError("--tol-flat must be positive");
    if (n && tol) throw ConfigError("--n and --tol are mutually exclusive");
    if (n && *n < 1) throw ConfigError("--n must be positive");
    if (tol && !(*tol >= 1e-14)) throw ConfigError("--tol must be at least 1e-14");
    if (omega && !(*omega > 0.0)) throw ConfigError("--omega must be positive");
    if (period && !(*period > 0.0)) throw ConfigError("--period must be positive");
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    auto number = [&](const char* key) {
        if (!doc[key].is_number()) throw ConfigError(std::string("config: field '") + key + "' must be a number");
        return doc[key].get<double>();
    };
    auto integer = [&](const char* key) {
        if (!doc[key].is_number_integer())
            throw ConfigError(std::string("config: field '") + key + "' must be an integer");
        return doc[key].get<int>();
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "symbol") {
            if (it->is_string()) {
                cfg.source = {SymbolSource::Kind::File, it->get<std::string>()};
            } else if (it->is_object()) {
                cfg.source = {SymbolSource::Kind::InlineJson, it->dump()};
            } else {
                throw ConfigError("config: field 'symbol' must be a path or an object");
            }
        } else if (key == "builtin") {
            if (!it->is_string()) throw ConfigError("config: field 'builtin' must be a string");
            cfg.source = {SymbolSource::Kind::Builtin, it->get<std::string>()};
        } else if (key == "omega") {
            cfg.omega = number("omega");
        } else if (key == "period") {
            cfg.period = number("period");
        } else if (key == "grid") {
            cfg.grid = integer("grid");
        } else if (key == "n") {
            cfg.n = integer("n");
        } else if (key == "tol") {
            cfg.tol = number("tol");
        } else if (key == "m_top") {
            cfg.m_top = integer("m_top");
        } else if (key == "out") {
            if (!it->is_string()) throw ConfigError("config: field 'out' must be a string");
            cfg.out = it->get<std::string>();
        } else if (key == "tol_flat") {
            cfg.tol_flat = number("tol_flat");
        } else if (key == "truncate") {
            if (!it->is_boolean()) throw ConfigError("config: field 'truncate' must be a boolean");
            cfg.truncate_at_floor = it->get<bool>();
        } else {
            throw ConfigError("config: unknown field '" + key + "'");
        }
    }
    if (doc.contains("symbol") && doc.contains("builtin"))
        throw ConfigError("config: give exactly one of 'symbol' and 'builtin'");
}

int cmd_bands(const RunConfig& cfg, std::ostream& log, std::optional<double> dump_k) {
    cfg.validate();
    const PeriodicSymbol sym = cfg.symbol();
    const int N = cfg.truncation(sym);
    const auto grid = interior_grid(cfg, sym.dual_period());
    bands::SweepOptions options;
    options.m_top = cfg.m_top;
    options.tol_flat = cfg.tol_flat;
    options.truncate_at_floor = cfg.truncate_at_floor;
    const auto branches = bands::sweep(sym, N, grid, options);
    {
        auto out = open_output(cfg, "bands.csv");
        bands::write_bands_csv(out, branches);
    }
    write_json(cfg, "bands_meta.json", bands::bands_meta_json(branches));
    if (dump_k) {
        auto out = open_output(cfg, "matrix.csv");
        fiber::write_matrix_csv(out, fiber::build_fiber_factorized(sym, *dump_k, N));
    }
    log << "bands: " << branches.size() << " branches, N = " << N << ", grid = " << grid.size() << '\n';
    return kOk;
}

int cmd_secdet(const RunConfig& cfg, std::span<const Complex> s_list, std::span<const Complex> lambda_list,
               std::ostream& log) {
    cfg.validate();
    const PeriodicSymbol sym = cfg.symbol();
    const int N = cfg.n ? cfg.truncation(sym) : std::max(40, cfg.truncation(sym));
    std::vector<secdet::SecdetRow> rows;
    for (Complex s : s_list)
        for (Complex lambda : lambda_list) rows.push_back({s, lambda, secdet::secular_det(sym, s, lambda, N)});
    {
        auto out = open_output(cfg, "secdet.csv");
        secdet::write_secdet_csv(out, rows);
    }
    ordered_json report;
    report["N"] = N;
    report["reports"] = ordered_json::array();
    bool all = true;
    for (Complex lambda : lambda_list) {
        if (lambda.imag() != 0.0) continue;  // the identity suite is stated for real lambda
        for (Complex s : s_list) {
            const auto r = secdet::check_identities(sym, lambda.real(), s, N);
            all = all && r.passed();
            report["reports"].push_back(r.to_json());
        }
    }
    report["passed"] = all;
    write_json(cfg, "secdet_identities.json", report);
    log << "secdet: " << rows.size() << " evaluations, identities " << (all ? "pass" : "fail") << '\n';
    return all ? kOk : kToleranceBreach;
}

int cmd_mathieu_sweep(const RunConfig& cfg, double A_lo, double A_hi, int count, std::ostream& log) {
    cfg.validate();
    if (count < 1) throw ConfigError("--a-count must be positive");
    if (!(A_lo <= A_hi)) throw ConfigError("--a-range must satisfy lo <= hi");
    const double omega = cfg.resolved_omega();
    mathieu::MathieuParams p = mathieu::MathieuParams::with(0.0, omega, cfg.n.value_or(60), cfg.grid);
    for (int i = 0; i < count; ++i)
        p.A_grid.push_back(count == 1 ? A_lo : A_lo + (A_hi - A_lo) * double(i) / double(count - 1));
    const auto rows = mathieu::sweep_A(p, cfg.m_top);
    auto out = open_output(cfg, "mathieu_sweep.csv");
    mathieu::write_sweep_csv(out, rows);
    log << "mathieu-sweep: " << rows.size() << " values of A\n";
    return kOk;
}

int cmd_mathieu_flat(const RunConfig& cfg, double A_lo, double A_hi, double tol_A, std::ostream& log) {
    cfg.validate();
    const double omega = cfg.resolved_omega();
    const mathieu::MathieuParams p = mathieu::MathieuParams::with(0.0, omega, cfg.n.value_or(60), cfg.grid);
    const auto r = mathieu::find_flat_A(p, A_lo, A_hi, tol_A, 1e-6);
    write_json(cfg, "astar.json", mathieu::astar_json(r));
    log.precision(10);
    log << "mathieu-flat: A* = " << r.A_star << " after " << r.iterations << " bisection steps, flatness "
        << (r.passed() ? "pass" : "fail") << '\n';
    return r.passed() ? kOk : kToleranceBreach;
}

int cmd_dump_matrix(const RunConfig& cfg, Complex s, std::ostream& log) {
    cfg.validate();
    const PeriodicSymbol sym = cfg.symbol();
    const int N = cfg.truncation(sym);
    auto out = open_output(cfg, "matrix.csv");
    const FiberMatrix H = s.imag() == 0.0 ? fiber::build_fiber_factorized(sym, s.real(), N) : fiber::build_fiber(sym, s, N);
    fiber::write_matrix_csv(out, H);
    log << "dump-matrix: " << H.size() << " x " << H.size() << '\n';
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const PeriodicSymbol sym = cfg.symbol();
    const double omega = sym.dual_period();
    const bool mathieu_case = cfg.is_builtin_mathieu();
    const double A = mathieu_case ? cfg.mathieu_A() : 0.0;
    const int m_top = std::max(cfg.m_top, 4);
    RunConfig sized = cfg;
    sized.m_top = m_top;
    const int N = sized.truncation(sym);
    const auto grid = interior_grid(cfg, omega);
    std::vector<Check> checks;

    // Reference elliptic function.
    {
        const Complex s(0.3 * omega, 0.2);
        const Complex p = special::ref_elliptic(s, omega);
        const Complex i(0.0, 1.0);
        double worst = 0.0;
        for (Complex other : {special::ref_elliptic(-s, omega), special::ref_elliptic(s + omega, omega),
                              special::ref_elliptic(s + 2.0 * i, omega)})
            worst = std::max(worst, std::abs(other - p));
        worst = std::max(worst, std::abs(special::ref_elliptic(s + i, omega) + p));
        worst = std::max(worst, std::abs(special::ref_elliptic(Complex(omega / 2, 0.5), omega)));
        checks.push_back(verdict("elliptic-identities", worst <= 1e-10, "max deviation " + sci(worst)));
    }

    // Fiber construction.
    {
        const double k = 0.2 * omega;
        const FiberMatrix a = fiber::build_fiber(sym, Complex(k, 0.0), N);
        const FiberMatrix b = fiber::build_fiber_factorized(sym, k, N);
        double worst = 0.0;
        for (std::size_t r = 0; r < a.size(); ++r)
            for (std::size_t c = 0; c < a.size(); ++c) {
                const Complex x = a.entries()(r, c), y = b.entries()(r, c);
                const double scale = std::max(std::abs(x), std::abs(y));
                if (scale > 0.0) worst = std::max(worst, std::abs(x - y) / scale);
            }
        checks.push_back(verdict("fiber-forms-agree", worst <= 1e-12, "max relative difference " + sci(worst)));
        const double defect = a.entries().hermitian_defect() / a.entries().max_abs();
        checks.push_back(verdict("hermiticity", defect <= 1e-13, "relative defect " + sci(defect)));
    }

    bands::SweepOptions options;
    options.m_top = m_top;
    options.tol_flat = cfg.tol_flat;
    options.truncate_at_floor = true;
    const auto branches = bands::sweep(sym, N, grid, options);
    // Flatness is only resolvable for values well above tol_flat.
    std::vector<bands::BandBranch> resolved;
    for (const auto& b : branches)
        if (std::abs(b.mean()) >= 100.0 * cfg.tol_flat) resolved.push_back(b);
    const auto top = bands::top_by_modulus(resolved, 2 * m_top);

    if (mathieu_case && A == 0.0) {
        const auto top8 = bands::top_by_modulus(branches, 8);
        double worst = 0.0;
        bool ok = top8.size() == 8;
        for (const auto& b : top8) {
            worst = std::max(worst, b.spread());
            ok = ok && b.spread() < 1e-8;
        }
        checks.push_back(verdict("all-flat", ok, std::to_string(top8.size()) + " branches, max spread " + sci(worst)));
    } else {
        int flat = 0;
        for (const auto& b : top) flat += b.flat ? 1 : 0;
        checks.push_back({"all-flat", "skip", std::to_string(flat) + " of " + std::to_string(top.size()) +
                                                  " tracked branches are flat"});
    }

    {
        const auto ordered = bands::order_by_modulus(top, true);
        const auto report = bands::check_alternation(ordered);
        if (report.skipped) {
            checks.push_back({"alternation", "skip", "no non-flat branches"});
        } else {
            checks.push_back(verdict("alternation", report.passed(),
                                     std::to_string(report.checked_branches) + " branches, " +
                                         std::to_string(report.violations.size()) + " violations"));
        }
    }
    {
        const auto intervals = bands::band_intervals(top);
        const auto report = bands::check_disjointness(intervals);
        checks.push_back(verdict("disjointness", report.passed(),
                                 std::to_string(report.touching_pairs) + " touching pairs, " +
                                     std::to_string(report.overlaps.size() + report.reflection_overlaps.size() +
                                                    report.unmatched_flat.size()) +
                                     " violations"));
    }
    {
        bool ok = true;
        for (const auto& b : branches) ok = ok && bands::gronwall_envelope_check(b);
        checks.push_back(verdict("gronwall-envelope", ok, std::to_string(branches.size()) + " branches"));
    }
    {
        const double dev = bands::period_doubling_check(sym, 0.2 * omega, N, 10);
        checks.push_back(verdict("period-doubling", dev <= 1e-9, "max deviation " + sci(dev)));
    }
    for (double k0 : {0.0, omega / 2}) {
        const auto report = bands::crossing_analysis(sym, N, k0, std::min(m_top, 4));
        std::string detail;
        for (const auto& e : report.entries) {
            if (!detail.empty()) detail += ", ";
            detail += std::string(bands::to_string(e.sign)) + std::to_string(e.rank) + ":" + bands::to_string(e.kind);
        }
        checks.push_back(verdict(k0 == 0.0 ? "crossings-at-0" : "crossings-at-half-period", report.passed(), detail));
    }

    // Secular determinant.
    const int Nd = std::max(N, 40);
    {
        const auto report = secdet::check_identities(sym, 0.4, Complex(0.2 * omega, 0.1), Nd);
        double worst = 0.0;
        for (const auto& c : report.checks) worst = std::max(worst, c.error);
        checks.push_back(verdict("determinant-identities", report.passed(), "max relative error " + sci(worst)));
    }
    {
        const auto fit = secdet::fit_affine_in_P(sym, 0.6, Nd);
        checks.push_back(verdict("affine-in-P", fit.fit_residual < 1e-8 * fit.residual_scale,
                                 "residual " + sci(fit.fit_residual)));
    }
    {
        const auto& b0 = top.front();
        const double worst = secdet::zero_consistency(sym, b0, Nd);
        checks.push_back(verdict("zero-consistency", worst < 1e-7, "max |Delta(k; E(k))| " + sci(worst)));
    }
    {
        double worst = 0.0;
        for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, laplace_kernel_residual(sym, t));
        checks.push_back(verdict("laplace-representation", worst < 1e-8, "max residual " + sci(worst)));
    }

    if (mathieu_case) {
        mathieu::MathieuParams p = mathieu::MathieuParams::with(A, omega, N, cfg.grid);
        {
            double worst = 0.0;
            for (double k : {0.0, 0.2 * omega, 0.4 * omega}) worst = std::max(worst, mathieu::check_A_reflection(p, k, m_top));
            checks.push_back(verdict("A-reflection", worst < 1e-10, "max deviation " + sci(worst)));
        }
        const auto counts = mathieu::check_sign_counts(p, 0.0);
        if (A >= 1.0) {
            checks.push_back(verdict("sign-counts", counts.min_eigenvalue >= -1e-9,
                                     "min eigenvalue " + sci(counts.min_eigenvalue)));
        } else if (A <= -1.0) {
            checks.push_back(verdict("sign-counts", counts.max_eigenvalue <= 1e-9,
                                     "max eigenvalue " + sci(counts.max_eigenvalue)));
        } else {
            checks.push_back(verdict("sign-counts", counts.certified_pos >= 6 && counts.certified_neg >= 6,
                                     "certified " + std::to_string(counts.certified_pos) + " positive, " +
                                         std::to_string(counts.certified_neg) + " negative; above 1e-6: " +
                                         std::to_string(counts.n_pos) + " / " + std::to_string(counts.n_neg)));
        }
        if (A == 0.0) {
            checks.push_back({"gap-openness", "skip", "A = 0 has only flat bands"});
        } else {
            const auto report = mathieu::check_gap_openness(p, 6);
            checks.push_back(verdict("gap-openness", report.passed(), "min band gap " + sci(report.min_band_gap)));
        }
    }

    bool ok = true;
    ordered_json doc;
    doc["symbol"] = nlohmann::json::parse(symbol_to_json(sym));
    doc["N"] = N;
    doc["grid"] = cfg.grid;
    doc["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        ok = ok && c.status != "fail";
        doc["checks"].push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
        log << c.name << ": " << c.status << " (" << c.detail << ")\n";
    }
    doc["passed"] = ok;
    write_json(cfg, "verify.json", doc);
    return ok ? kOk : kToleranceBreach;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Band structure toolkit for periodic Hankel operators"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, symbol_arg, builtin_arg;
    double omega = 0.0, period = 0.0, tol = 0.0;
    int n = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags take precedence)");
        sub->add_option("--symbol", symbol_arg, "Symbol JSON file, or inline JSON text");
        sub->add_option("--builtin", builtin_arg, "carleman or mathieu:A");
        sub->add_option("--omega", omega, "Dual period omega = 2 pi / T");
        sub->add_option("--period", period, "Period T");
        sub->add_option("--grid", cfg.grid, "Points on [0, omega/2]");
        sub->add_option("--n", n, "Truncation N (indices -N..N)");
        sub->add_option("--tol", tol, "Tail tolerance for automatic N");
        sub->add_option("--m-top", cfg.m_top, "Branches per sign");
        sub->add_option("--out", cfg.out, "Output directory");
        sub->add_option("--tol-flat", cfg.tol_flat, "Relative flatness tolerance");
    };

    auto* bands_cmd = app.add_subcommand("bands", "Band functions on the half cell");
    add_common(bands_cmd);
    double dump_k = 0.0;
    bands_cmd->add_option("--dump-matrix", dump_k, "Also write matrix.csv for the fiber at this k");
    bands_cmd->add_flag("--truncate", "Keep only the ranks that stay above the value floor");

    auto* secdet_cmd = app.add_subcommand("secdet", "Secular determinant and its identities");
    add_common(secdet_cmd);
    std::vector<std::string> s_args{"0.2,0.1", "0.11"}, lambda_args{"0.5"};
    secdet_cmd->add_option("--s", s_args, "Spectral parameters re[,im]");
    secdet_cmd->add_option("--lambda", lambda_args, "Values of lambda re[,im]");

    auto* sweep_cmd = app.add_subcommand("mathieu-sweep", "Mathieu band intervals over a range of A");
    add_common(sweep_cmd);
    std::vector<double> a_range{0.0, 1.2};
    int a_count = 61;
    sweep_cmd->add_option("--a-range", a_range, "A_lo A_hi")->expected(2);
    sweep_cmd->add_option("--a-count", a_count, "Number of A values");

    auto* flat_cmd = app.add_subcommand("mathieu-flat", "Locate the first flat-band point A*");
    add_common(flat_cmd);
    std::vector<double> bracket{0.3, 0.7};
    double tol_a = 1e-6;
    flat_cmd->add_option("--bracket", bracket, "A_lo A_hi")->expected(2);
    flat_cmd->add_option("--tol-a", tol_a, "Bisection width");

    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
    add_common(verify_cmd);

    auto* dump_cmd = app.add_subcommand("dump-matrix", "Write one fiber matrix as CSV");
    add_common(dump_cmd);
    std::string s_dump = "0";
    dump_cmd->add_option("--s", s_dump, "Spectral parameter re[,im]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kConfigError;
    }

    CLI::App* active = app.get_subcommands().front();
    auto given = [&](const char* flag) { return active->count(flag) > 0; };
    try {
        if (given("--config")) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(read_file(config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            apply_config_json(cfg, doc);
        }
        // Flags override the config file.
        if (given("--grid")) cfg.grid = active->get_option("--grid")->as<int>();
        if (given("--m-top")) cfg.m_top = active->get_option("--m-top")->as<int>();
        if (given("--out")) cfg.out = active->get_option("--out")->as<std::string>();
        if (active->get_name() == "bands" && given("--truncate")) cfg.truncate_at_floor = true;
        if (given("--tol-flat")) cfg.tol_flat = active->get_option("--tol-flat")->as<double>();
        if (given("--symbol") && given("--builtin")) throw ConfigError("give exactly one of --symbol and --builtin");
        if (given("--symbol")) {
            const bool inline_json = symbol_arg.find('{') != std::string::npos;
            cfg.source = {inline_json ? SymbolSource::Kind::InlineJson : SymbolSource::Kind::File, symbol_arg};
        }
        if (given("--builtin")) cfg.source = {SymbolSource::Kind::Builtin, builtin_arg};
        if (given("--omega")) cfg.omega = omega;
        if (given("--period")) cfg.period = period;
        if (given("--n")) {
            cfg.n = n;
            cfg.tol.reset();
        }
        if (given("--tol")) {
            if (given("--n")) throw ConfigError("--n and --tol are mutually exclusive");
            cfg.tol = tol;
            cfg.n.reset();
        }

        const std::string name = active->get_name();
        if (name == "bands")
            return cmd_bands(cfg, out, given("--dump-matrix") ? std::optional<double>(dump_k) : std::nullopt);
        if (name == "secdet") {
            std::vector<Complex> s_list, lambda_list;
            for (const auto& s : s_args) s_list.push_back(parse_complex(s));
            for (const auto& l : lambda_args) lambda_list.push_back(parse_complex(l));
            return cmd_secdet(cfg, s_list, lambda_list, out);
        }
        if (name == "mathieu-sweep") return cmd_mathieu_sweep(cfg, a_range[0], a_range[1], a_count, out);
        if (name == "mathieu-flat") return cmd_mathieu_flat(cfg, bracket[0], bracket[1], tol_a, out);
        if (name == "verify") return cmd_verify(cfg, out);
        if (name == "dump-matrix") return cmd_dump_matrix(cfg, parse_complex(s_dump), out);
        throw ConfigError("unknown subcommand " + name);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ArgumentError& e) {
        err << "argument error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomainError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kToleranceBreach;
    }
}

}  // namespace hankelbands::cli
