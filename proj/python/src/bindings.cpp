#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bandflow/analytics.hpp"
#include "bandflow/bessel.hpp"
#include "bandflow/commands.hpp"
#include "bandflow/errors.hpp"
#include "bandflow/flow.hpp"
#include "bandflow/models.hpp"
#include "bandflow/oracle.hpp"
#include "bandflow/text_io.hpp"
#include "cli.hpp"

namespace py = pybind11;
using namespace bandflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> values) {
    Array out(static_cast<py::ssize_t>(values.size()));
    std::copy(values.begin(), values.end(), out.mutable_data());
    return out;
}

Array dense_to_array(const DenseMatrix& m) {
    const auto n = static_cast<py::ssize_t>(m.dim());
    Array out({n, n});
    auto view = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i)
        for (py::ssize_t j = 0; j < n; ++j) view(i, j) = m(i, j);
    return out;
}

DenseMatrix array_to_dense(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
        throw InputError("expected a square 2-d array");
    }
    DenseMatrix m(static_cast<std::size_t>(a.shape(0)));
    auto view = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = view(i, j);
    return m;
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) {
        throw InputError("expected a 1-d array");
    }
    return {a.data(), a.data() + a.size()};
}

void bind_matrix(py::module_& m) {
    py::class_<BandedSymmetricMatrix>(m, "BandedMatrix",
                                      "Real symmetric matrix that is zero outside |n - m| <= bandwidth.")
        .def(py::init<std::size_t, std::size_t>(), py::arg("dim"), py::arg("bandwidth"))
        .def_static(
            "tridiagonal",
            [](const Array& d, const Array& e) {
                return BandedSymmetricMatrix::tridiagonal(to_vector(d), to_vector(e));
            },
            py::arg("diag"), py::arg("offdiag"))
        .def_static(
            "from_dense", [](const Array& a) { return from_dense(array_to_dense(a)); }, py::arg("matrix"))
        .def_static("load", &load_matrix, py::arg("path"))
        .def("save", [](const BandedSymmetricMatrix& h, const std::string& path) { save_matrix(path, h); })
        .def_property_readonly("dim", &BandedSymmetricMatrix::dim)
        .def_property_readonly("bandwidth", &BandedSymmetricMatrix::bandwidth)
        .def("__getitem__",
             [](const BandedSymmetricMatrix& h, std::pair<std::size_t, std::size_t> nm) {
                 if (nm.first >= h.dim() || nm.second >= h.dim()) throw py::index_error("index out of range");
                 return h.get(nm.first, nm.second);
             })
        .def("__setitem__",
             [](BandedSymmetricMatrix& h, std::pair<std::size_t, std::size_t> nm, double v) {
                 h.set(nm.first, nm.second, v);
             })
        .def("band", [](const BandedSymmetricMatrix& h, std::size_t k) { return to_array(h.band(k)); })
        .def("diagonal", [](const BandedSymmetricMatrix& h) { return to_array(h.diagonal()); })
        .def("to_dense", [](const BandedSymmetricMatrix& h) { return dense_to_array(h.to_dense()); })
        .def("trace", [](const BandedSymmetricMatrix& h) { return trace(h); })
        .def("frobenius_norm_sq", [](const BandedSymmetricMatrix& h) { return frobenius_norm_sq(h); })
        .def("offdiag_norm_sq", [](const BandedSymmetricMatrix& h) { return offdiag_norm_sq(h); })
        .def("__repr__", [](const BandedSymmetricMatrix& h) {
            return "BandedMatrix(dim=" + std::to_string(h.dim()) + ", bandwidth=" +
                   std::to_string(h.bandwidth()) + ")";
        });
}

void bind_flow(py::module_& m) {
    py::enum_<GeneratorKind>(m, "Generator")
        .value("MIELKE", GeneratorKind::Mielke)
        .value("WEGNER", GeneratorKind::Wegner);

    py::class_<FlowConfig>(m, "FlowConfig")
        .def(py::init<>())
        .def_readwrite("generator", &FlowConfig::generator)
        .def_readwrite("rel_tol", &FlowConfig::rel_tol)
        .def_readwrite("abs_tol", &FlowConfig::abs_tol)
        .def_readwrite("convergence_tol", &FlowConfig::convergence_tol)
        .def_readwrite("ell_max", &FlowConfig::ell_max)
        .def_readwrite("snapshot_ells", &FlowConfig::snapshot_ells)
        .def_readwrite("record_steps", &FlowConfig::record_steps)
        .def_readwrite("max_steps", &FlowConfig::max_steps);

    py::class_<IrreducibleBlock>(m, "IrreducibleBlock")
        .def_readonly("start", &IrreducibleBlock::start)
        .def_readonly("end", &IrreducibleBlock::end)
        .def("__len__", &IrreducibleBlock::size);

    py::class_<Snapshot>(m, "Snapshot").def_readonly("ell", &Snapshot::ell).def_readonly("matrix", &Snapshot::matrix);

    py::class_<TraceRow>(m, "TraceRow")
        .def_readonly("ell", &TraceRow::ell)
        .def_readonly("trace", &TraceRow::trace)
        .def_readonly("frob_sq", &TraceRow::frob_sq)
        .def_readonly("offdiag_sq", &TraceRow::offdiag_sq)
        .def_property_readonly("diagonal", [](const TraceRow& r) { return to_array(r.diagonal); });

    py::class_<ConservationReport>(m, "ConservationReport")
        .def_readonly("trace_drift", &ConservationReport::trace_drift)
        .def_readonly("frobenius_drift", &ConservationReport::frobenius_drift)
        .def_readonly("partial_trace_violation", &ConservationReport::partial_trace_violation);

    py::class_<FlowResult>(m, "FlowResult")
        .def_readonly("final", &FlowResult::final)
        .def_readonly("ell_final", &FlowResult::ell_final)
        .def_readonly("converged", &FlowResult::converged)
        .def_readonly("blocks", &FlowResult::blocks)
        .def_readonly("snapshots", &FlowResult::snapshots)
        .def_readonly("trace", &FlowResult::trace)
        .def_readonly("diagnostics", &FlowResult::diagnostics)
        .def_readonly("steps", &FlowResult::steps);

    m.def("integrate_flow", &integrate_flow, py::arg("h"), py::arg("config") = FlowConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("mielke_rhs", &mielke_rhs, py::arg("h"));
    m.def(
        "wegner_rhs", [](const Array& a) { return dense_to_array(wegner_rhs(array_to_dense(a))); }, py::arg("h"));
    m.def("default_ell_max", &default_ell_max, py::arg("h"), py::arg("generator") = GeneratorKind::Mielke);
    m.def("split_irreducible", &split_irreducible, py::arg("h"));
}

void bind_oracle(py::module_& m) {
    m.def(
        "eigenvalues", [](const BandedSymmetricMatrix& h) { return to_array(oracle::eigenvalues(h).eigenvalues); },
        py::arg("h"), "Reference eigenvalues, ascending (bisection or Jacobi).");
    m.def(
        "eigenvalues_tridiag",
        [](const Array& d, const Array& e) {
            return to_array(oracle::eigenvalues_tridiag(to_vector(d), to_vector(e)).eigenvalues);
        },
        py::arg("diag"), py::arg("offdiag"));
    m.def(
        "eigenvalues_dense",
        [](const Array& a) { return to_array(oracle::eigenvalues_dense(array_to_dense(a)).eigenvalues); },
        py::arg("matrix"));
    m.def(
        "sturm_count",
        [](const Array& d, const Array& e, double x) { return oracle::sturm_count(to_vector(d), to_vector(e), x); },
        py::arg("diag"), py::arg("offdiag"), py::arg("x"));
}

void bind_models(py::module_& m) {
    py::enum_<LipkinBlock>(m, "LipkinBlock").value("A", LipkinBlock::A).value("B", LipkinBlock::B);
    py::enum_<Branch>(m, "Branch").value("PLUS", Branch::Plus).value("MINUS", Branch::Minus);

    py::class_<LipkinParams>(m, "LipkinParams")
        .def(py::init([](double xi0, double v0, int two_j) { return LipkinParams{xi0, v0, two_j}; }),
             py::arg("xi0") = 1.0, py::arg("v0") = 0.0, py::arg("two_j") = 2)
        .def_readwrite("xi0", &LipkinParams::xi0)
        .def_readwrite("v0", &LipkinParams::v0)
        .def_readwrite("two_j", &LipkinParams::two_j)
        .def_property_readonly("j", &LipkinParams::j);

    py::class_<SpinBosonParams>(m, "SpinBosonParams")
        .def(py::init([](double delta, double lambda, double omega, Branch branch, std::size_t n_trunc) {
                 return SpinBosonParams{delta, lambda, omega, branch, n_trunc};
             }),
             py::arg("delta") = 0.0, py::arg("lambda_") = 0.0, py::arg("omega") = 1.0,
             py::arg("branch") = Branch::Plus, py::arg("n_trunc") = 64)
        .def_readwrite("delta", &SpinBosonParams::delta)
        .def_readwrite("lambda_", &SpinBosonParams::lambda)
        .def_readwrite("omega", &SpinBosonParams::omega)
        .def_readwrite("branch", &SpinBosonParams::branch)
        .def_readwrite("n_trunc", &SpinBosonParams::n_trunc);

    m.def("build_lipkin_block", &build_lipkin_block, py::arg("params"), py::arg("block"));
    m.def("build_spinboson", &build_spinboson, py::arg("params"));
    m.def("certify_truncation", &certify_truncation, py::arg("params"), py::arg("n_target"),
          py::arg("tol") = 1e-8, py::arg("max_dim") = std::size_t{1} << 15);

    py::class_<LipkinReducedState>(m, "LipkinReducedState")
        .def_readonly("a", &LipkinReducedState::a)
        .def_readonly("b", &LipkinReducedState::b)
        .def_readonly("f", &LipkinReducedState::f);
    m.def("lipkin_reduced_invariant", &lipkin_reduced_invariant, py::arg("state"), py::arg("params"));
    m.def(
        "integrate_lipkin_reduced",
        [](const LipkinParams& p, LipkinBlock b, double ell_end) {
            auto traj = integrate_lipkin_reduced(p, b, ell_end);
            return py::make_tuple(traj.ell, traj.states);
        },
        py::arg("params"), py::arg("block"), py::arg("ell_end"),
        "Returns (ell, states) for the three-variable reduced Lipkin flow.");

    m.def(
        "integrate_spinboson_reduced",
        [](const SpinBosonParams& p, std::size_t n, std::size_t half_width, std::vector<double> xs) {
            auto sol = integrate_spinboson_reduced(p, n, half_width, std::move(xs));
            const std::size_t rows = sol.f.size();
            const std::size_t cols = sol.f_at_one.size();
            Array f({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
            auto view = f.mutable_unchecked<2>();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) view(i, j) = sol.f[i][j];
            return py::make_tuple(sol.n_lo, f, to_array(sol.f_at_one));
        },
        py::arg("params"), py::arg("n"), py::arg("half_width"), py::arg("x"),
        "Returns (n_lo, f[sample, level - n_lo], f_at_one[level - n_lo]).");
}

void bind_analytics(py::module_& m) {
    m.def("lipkin_rpa_spectrum", &lipkin_rpa_spectrum, py::arg("params"), py::arg("n"), py::arg("block"));
    m.def("lipkin_rpa_gap", &lipkin_rpa_gap, py::arg("params"));
    m.def("spinboson_fnx", &spinboson_fnx, py::arg("n"), py::arg("x"), py::arg("params"));

    py::enum_<AsymptoticFormula>(m, "AsymptoticFormula")
        .value("BESSEL", AsymptoticFormula::Bessel)
        .value("COSINE", AsymptoticFormula::Cosine);
    py::class_<AsymptoticEigenvalue>(m, "AsymptoticEigenvalue")
        .def_readonly("n", &AsymptoticEigenvalue::n)
        .def_readonly("value", &AsymptoticEigenvalue::value)
        .def_readonly("formula", &AsymptoticEigenvalue::formula)
        .def_readonly("cond_f", &AsymptoticEigenvalue::cond_f)
        .def_readonly("cond_order", &AsymptoticEigenvalue::cond_order);
    m.def("spinboson_eps_asym", &spinboson_eps_asym, py::arg("n"), py::arg("params"),
          py::arg("formula") = AsymptoticFormula::Bessel);

    m.def("bessel_j0", &bessel_j0, py::arg("z"));
    m.def("bessel_j1", &bessel_j1, py::arg("z"));
    m.def("bessel_y0", &bessel_y0, py::arg("z"));
    m.def("bessel_y1", &bessel_y1, py::arg("z"));
}

void bind_commands(py::module_& m) {
    py::class_<SpectrumRow>(m, "SpectrumRow")
        .def_readonly("sector", &SpectrumRow::sector)
        .def_readonly("n", &SpectrumRow::n)
        .def_readonly("eps_flow", &SpectrumRow::eps_flow)
        .def_readonly("eps_oracle", &SpectrumRow::eps_oracle)
        .def_readonly("eps_asym1", &SpectrumRow::eps_asym1)
        .def_readonly("eps_asym2", &SpectrumRow::eps_asym2)
        .def_readonly("rel_err_asym1", &SpectrumRow::rel_err_asym1)
        .def_readonly("rel_err_asym2", &SpectrumRow::rel_err_asym2)
        .def_readonly("cond_f", &SpectrumRow::cond_f)
        .def_readonly("cond_order", &SpectrumRow::cond_order)
        .def_readonly("valid", &SpectrumRow::valid);
    py::class_<SpectrumReport>(m, "SpectrumReport")
        .def_readonly("rows", &SpectrumReport::rows)
        .def_readonly("converged", &SpectrumReport::converged)
        .def_readonly("n_trunc", &SpectrumReport::n_trunc);

    m.def(
        "spectrum_lipkin",
        [](const LipkinParams& p, std::vector<std::size_t> levels, const FlowConfig& flow) {
            SpectrumOptions opt;
            opt.model = ModelKind::Lipkin;
            opt.lipkin = p;
            opt.levels = std::move(levels);
            opt.flow = flow;
            py::gil_scoped_release release;
            return run_spectrum(opt);
        },
        py::arg("params"), py::arg("levels") = std::vector<std::size_t>{}, py::arg("flow") = FlowConfig{});
    m.def(
        "spectrum_spinboson",
        [](const SpinBosonParams& p, std::vector<std::size_t> levels, bool certify, const FlowConfig& flow) {
            SpectrumOptions opt;
            opt.model = ModelKind::SpinBoson;
            opt.spinboson = p;
            opt.levels = std::move(levels);
            opt.certify = certify;
            opt.flow = flow;
            py::gil_scoped_release release;
            return run_spectrum(opt);
        },
        py::arg("params"), py::arg("levels") = std::vector<std::size_t>{}, py::arg("certify") = true,
        py::arg("flow") = FlowConfig{});

    py::class_<Fig1Row>(m, "Fig1Row")
        .def_readonly("delta_over_omega", &Fig1Row::delta_over_omega)
        .def_readonly("n", &Fig1Row::n)
        .def_readonly("rel_err_asym1", &Fig1Row::rel_err_asym1)
        .def_readonly("rel_err_plus", &Fig1Row::rel_err_plus)
        .def_readonly("rel_err_minus", &Fig1Row::rel_err_minus)
        .def_readonly("cond_f", &Fig1Row::cond_f)
        .def_readonly("cond_order", &Fig1Row::cond_order)
        .def_readonly("valid", &Fig1Row::valid)
        .def_readonly("ordering_ok", &Fig1Row::ordering_ok);
    py::class_<Fig1Report>(m, "Fig1Report")
        .def_readonly("rows", &Fig1Report::rows)
        .def_readonly("converged", &Fig1Report::converged);
    m.def(
        "fig1",
        [](double lambda_over_omega, std::vector<std::size_t> n_list, std::vector<double> deltas, double omega) {
            Fig1Options opt;
            opt.lambda_over_omega = lambda_over_omega;
            opt.n_list = std::move(n_list);
            opt.delta_over_omega = std::move(deltas);
            opt.omega = omega;
            py::gil_scoped_release release;
            return run_fig1(opt);
        },
        py::arg("lambda_over_omega") = 4.0, py::arg("n_list") = std::vector<std::size_t>{10, 15, 20},
        py::arg("delta_over_omega") = std::vector<double>{}, py::arg("omega") = 1.0);

    py::class_<CompareRow>(m, "CompareRow")
        .def_readonly("generator", &CompareRow::generator)
        .def_readonly("ell", &CompareRow::ell)
        .def_readonly("ell_scaled", &CompareRow::ell_scaled)
        .def_readonly("offset", &CompareRow::offset)
        .def_readonly("max_abs", &CompareRow::max_abs);
    py::class_<CompareReport>(m, "CompareReport")
        .def_readonly("rows", &CompareReport::rows)
        .def_readonly("norm", &CompareReport::norm)
        .def_readonly("mielke_final_diagonal", &CompareReport::mielke_final_diagonal)
        .def_readonly("wegner_final_diagonal", &CompareReport::wegner_final_diagonal)
        .def_readonly("oracle_eigenvalues", &CompareReport::oracle_eigenvalues);
    m.def(
        "compare_generators",
        [](std::optional<BandedSymmetricMatrix> h, std::vector<double> scaled_ells) {
            CompareOptions opt;
            opt.matrix = std::move(h);
            opt.scaled_ells = std::move(scaled_ells);
            py::gil_scoped_release release;
            return run_compare_generators(opt);
        },
        py::arg("h") = py::none(), py::arg("scaled_ells") = std::vector<double>{});

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "bandflow");
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (status, stdout, stderr).");
}

} // namespace

PYBIND11_MODULE(_bandflow, m) {
    m.doc() = "Banded flow-equation diagonalization";

    auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", input_error.ptr());
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FlowError>(m, "FlowError", PyExc_RuntimeError);
    py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);

    bind_matrix(m);
    bind_flow(m);
    bind_oracle(m);
    bind_models(m);
    bind_analytics(m);
    bind_commands(m);
}
