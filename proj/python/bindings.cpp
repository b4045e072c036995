#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hankelbands/bands.hpp"
#include "hankelbands/cli.hpp"
#include "hankelbands/errors.hpp"
#include "hankelbands/fiber.hpp"
#include "hankelbands/linalg.hpp"
#include "hankelbands/mathieu.hpp"
#include "hankelbands/secdet.hpp"
#include "hankelbands/special.hpp"
#include "hankelbands/symbol.hpp"

namespace py = pybind11;
using namespace hankelbands;

namespace {

py::array_t<Complex> to_numpy(const ComplexMatrix& m) {
    py::array_t<Complex> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) view(py::ssize_t(i), py::ssize_t(j)) = m(i, j);
    return out;
}

ComplexMatrix from_numpy(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2-d array");
    ComplexMatrix m(std::size_t(a.shape(0)), std::size_t(a.shape(1)));
    auto view = a.unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = view(py::ssize_t(i), py::ssize_t(j));
    return m;
}

py::dict branch_dict(const bands::BandBranch& b) {
    std::vector<double> k, v;
    for (const auto& s : b.samples) {
        k.push_back(s.k);
        v.push_back(s.value);
    }
    py::dict d;
    d["branch_id"] = b.branch_id;
    d["sign"] = bands::to_string(b.sign);
    d["rank"] = b.rank;
    d["flat"] = b.flat;
    d["monotonicity"] = bands::to_string(b.monotonicity);
    d["k"] = py::array_t<double>(py::ssize_t(k.size()), k.data());
    d["value"] = py::array_t<double>(py::ssize_t(v.size()), v.data());
    return d;
}

py::object json_to_py(const nlohmann::ordered_json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Band structure toolkit for periodic Hankel operators";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<TrackingError>(m, "TrackingError", numerical.ptr());
    py::register_exception<BracketError>(m, "BracketError", numerical.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("log_gamma", &special::log_gamma, py::arg("z"));
    m.def("gamma", &special::gamma, py::arg("z"));
    m.def("ref_elliptic", &special::ref_elliptic, py::arg("s"), py::arg("omega"), py::arg("tol") = 1e-15);

    py::class_<PeriodicSymbol>(m, "PeriodicSymbol")
        .def(py::init<double, CoefficientMap>(), py::arg("period"), py::arg("coefficients"))
        .def_static("from_nonnegative", &PeriodicSymbol::from_nonnegative, py::arg("period"), py::arg("coefficients"))
        .def_static("carleman", &PeriodicSymbol::carleman, py::arg("period") = 2.0 * 3.14159265358979323846)
        .def_static("mathieu", &PeriodicSymbol::mathieu, py::arg("A"), py::arg("omega") = 1.0)
        .def_static("from_json", [](const std::string& text) { return parse_symbol_json(text); }, py::arg("text"))
        .def("to_json", [](const PeriodicSymbol& s) { return symbol_to_json(s); })
        .def_property_readonly("period", &PeriodicSymbol::period)
        .def_property_readonly("omega", &PeriodicSymbol::dual_period)
        .def_property_readonly("coefficients", &PeriodicSymbol::coefficients)
        .def("__call__", [](const PeriodicSymbol& s, double xi) { return evaluate_symbol(s, xi); }, py::arg("xi"))
        .def("laplace_residual", [](const PeriodicSymbol& s, double t) { return laplace_kernel_residual(s, t); },
             py::arg("t"));

    m.def(
        "fiber_matrix",
        [](const PeriodicSymbol& sym, Complex s, int N) {
            if (s.imag() == 0.0) return to_numpy(fiber::build_fiber_factorized(sym, s.real(), N).entries());
            return to_numpy(fiber::build_fiber(sym, s, N).entries());
        },
        py::arg("symbol"), py::arg("s"), py::arg("N"));
    m.def("choose_truncation", &fiber::choose_truncation, py::arg("symbol"), py::arg("k"), py::arg("tol") = 1e-12);
    m.def(
        "eigvalsh", [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
            return linalg::hermitian_eigvals(from_numpy(a));
        },
        py::arg("matrix"));

    m.def("half_cell_grid", &bands::half_cell_grid, py::arg("omega"), py::arg("points") = 101);
    m.def(
        "sweep",
        [](const PeriodicSymbol& sym, int N, std::vector<double> grid, int m_top, double tol_flat, bool truncate) {
            bands::SweepOptions options;
            options.m_top = m_top;
            options.tol_flat = tol_flat;
            options.truncate_at_floor = truncate;
            const auto branches = [&] {
                py::gil_scoped_release release;
                return bands::sweep(sym, N, grid, options);
            }();
            py::list out;
            for (const auto& b : branches) out.append(branch_dict(b));
            return out;
        },
        py::arg("symbol"), py::arg("N"), py::arg("grid"), py::arg("m_top") = 6, py::arg("tol_flat") = 1e-8,
        py::arg("truncate") = false);
    m.def("carleman_ranked", &bands::carleman_ranked, py::arg("omega"), py::arg("rank"), py::arg("k"));

    m.def("secular_det", &secdet::secular_det, py::arg("symbol"), py::arg("s"), py::arg("lam"), py::arg("N"));
    m.def(
        "check_identities",
        [](const PeriodicSymbol& sym, double lambda, Complex s, int N, double tol) {
            return json_to_py(secdet::check_identities(sym, lambda, s, N, tol).to_json());
        },
        py::arg("symbol"), py::arg("lam"), py::arg("s"), py::arg("N"), py::arg("tol") = 1e-8);
    m.def(
        "fit_affine_in_P",
        [](const PeriodicSymbol& sym, Complex lambda, int N) {
            const auto fit = secdet::fit_affine_in_P(sym, lambda, N);
            py::dict d;
            d["a"] = fit.a;
            d["b"] = fit.b;
            d["fit_residual"] = fit.fit_residual;
            d["residual_scale"] = fit.residual_scale;
            return d;
        },
        py::arg("symbol"), py::arg("lam"), py::arg("N"));

    m.def(
        "find_flat_A",
        [](double lo, double hi, double tol_A, double omega, int N, int k_points) {
            const auto p = mathieu::MathieuParams::with(0.0, omega, N, k_points);
            py::gil_scoped_release release;
            const auto r = mathieu::find_flat_A(p, lo, hi, tol_A, 1e-6);
            py::gil_scoped_acquire acquire;
            return json_to_py(mathieu::astar_json(r));
        },
        py::arg("lo") = 0.3, py::arg("hi") = 0.7, py::arg("tol_A") = 1e-6, py::arg("omega") = 1.0, py::arg("N") = 60,
        py::arg("k_points") = 101);
    m.def(
        "mathieu_sweep",
        [](std::vector<double> A_values, int m_top, double omega, int N, int k_points) {
            auto p = mathieu::MathieuParams::with(0.0, omega, N, k_points);
            p.A_grid = std::move(A_values);
            std::vector<mathieu::SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = mathieu::sweep_A(p, m_top);
            }
            py::list out;
            for (const auto& row : rows)
                for (const auto& b : row.bands) {
                    py::dict d;
                    d["A"] = row.A;
                    d["branch_id"] = b.branch_id;
                    d["sign"] = bands::to_string(b.sign);
                    d["lo"] = b.lo;
                    d["hi"] = b.hi;
                    d["flat"] = b.flat;
                    out.append(d);
                }
            return out;
        },
        py::arg("A_values"), py::arg("m_top") = 3, py::arg("omega") = 1.0, py::arg("N") = 60, py::arg("k_points") = 101);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "hankelbands");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(int(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
