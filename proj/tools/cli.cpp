#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "bandflow/commands.hpp"
#include "bandflow/errors.hpp"
#include "bandflow/text_io.hpp"

namespace bandflow::cli {

namespace {

Branch parse_branch(const std::string& text) {
    if (text == "+" || text == "+1" || text == "1" || text == "plus") return Branch::Plus;
    if (text == "-" || text == "-1" || text == "minus") return Branch::Minus;
    throw InputError("branch must be + or -, got '" + text + "'");
}

GeneratorKind parse_generator(const std::string& text) {
    if (text == "mielke") return GeneratorKind::Mielke;
    if (text == "wegner") return GeneratorKind::Wegner;
    throw InputError("generator must be mielke or wegner, got '" + text + "'");
}

/// "a,b,c" or "start:stop:count" (count points, both ends included).
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3) throw InputError("grid must look like start:stop:count");
        const double a = parse_double(parts[0]);
        const double b = parse_double(parts[1]);
        const double c = parse_double(parts[2]);
        if (!(c >= 2.0) || c != std::floor(c)) throw InputError("grid count must be an integer >= 2");
        const auto count = static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw InputError("empty list");
    return out;
}

std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : parse_grid(text)) {
        if (!(v >= 0.0) || v != std::floor(v)) throw InputError("levels must be non-negative integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

struct FlowFlags {
    std::optional<double> ell_max;
    double rtol = 1e-10;
    double atol = 1e-12;
    double conv_tol = 1e-10;

    void attach(CLI::App* app) {
        app->add_option("--ell-max", ell_max, "Flow-parameter cap (default: spectral-spread heuristic)");
        app->add_option("--rtol", rtol, "Integrator relative tolerance")->capture_default_str();
        app->add_option("--atol", atol, "Integrator absolute tolerance")->capture_default_str();
        app->add_option("--conv-tol", conv_tol, "Stop when the relative off-diagonal norm falls below this")
            ->capture_default_str();
    }

    FlowConfig config() const {
        FlowConfig cfg;
        cfg.ell_max = ell_max;
        cfg.rel_tol = rtol;
        cfg.abs_tol = atol;
        cfg.convergence_tol = conv_tol;
        return cfg;
    }
};

struct ThresholdFlags {
    ValidityThresholds t;

    void attach(CLI::App* app) {
        app->add_option("--cond-f-max", t.cond_f, "Validity threshold for lambda/(omega sqrt n)")
            ->capture_default_str();
        app->add_option("--cond-order-max", t.cond_order, "Validity threshold for the ordering parameter")
            ->capture_default_str();
    }
};

/// Output sink: a file when a path is given, otherwise the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot write '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }
    bool is_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

} // namespace

std::vector<std::string> expand_key_values(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    out.reserve(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        const auto eq = a.find('=');
        const bool key_value = i > 0 && eq != std::string::npos && eq > 0 && a[0] != '-' &&
                               std::all_of(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(eq),
                                           [](char c) { return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'; });
        if (!key_value) {
            out.push_back(a);
            continue;
        }
        std::string key = a.substr(0, eq);
        std::replace(key.begin(), key.end(), '_', '-');
        out.push_back("--" + key + "=" + a.substr(eq + 1));
    }
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flow-equation diagonalization of banded Hamiltonians"};
    app.name(raw_args.empty() ? "bandflow" : raw_args.front());
    app.require_subcommand(1);

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "Flow a matrix file to diagonal form and write the trace CSV");
    std::string matrix_path;
    std::string generator = "mielke";
    std::string trace_path;
    std::string trace_mode = "steps";
    std::string snapshot_list;
    FlowFlags flow_flags;
    flow_cmd->add_option("matrix", matrix_path, "Matrix file ('bandmat N M' format)")->required();
    flow_cmd->add_option("--generator", generator, "mielke or wegner")->capture_default_str();
    flow_cmd->add_option("--trace", trace_path, "Trace CSV path (default: stdout, summary to stderr)");
    flow_cmd->add_option("--trace-mode", trace_mode, "steps or snapshots")->capture_default_str();
    flow_cmd->add_option("--snapshots", snapshot_list, "Snapshot ells: a,b,c or start:stop:count");
    flow_flags.attach(flow_cmd);

    // spectrum
    auto* spec_cmd = app.add_subcommand("spectrum", "Compare flow, oracle and closed-form spectra of a model");
    std::string model = "spinboson";
    LipkinParams lip;
    SpinBosonParams sb;
    std::string branch = "+";
    std::optional<std::size_t> n_trunc;
    std::string levels;
    bool no_certify = false;
    std::string spec_out;
    FlowFlags spec_flow;
    ThresholdFlags spec_thr;
    spec_cmd->add_option("--model", model, "lipkin or spinboson")->capture_default_str();
    spec_cmd->add_option("--xi0", lip.xi0, "Lipkin single-particle splitting")->capture_default_str();
    spec_cmd->add_option("--v0", lip.v0, "Lipkin pair coupling")->capture_default_str();
    spec_cmd->add_option("--two-j", lip.two_j, "Twice the Lipkin total spin")->capture_default_str();
    spec_cmd->add_option("--delta", sb.delta, "Spin-boson tunnelling splitting")->capture_default_str();
    spec_cmd->add_option("--lambda", sb.lambda, "Spin-boson coupling")->capture_default_str();
    spec_cmd->add_option("--omega", sb.omega, "Boson frequency")->capture_default_str();
    spec_cmd->add_option("--branch", branch, "Spin-boson branch, + or -")->capture_default_str();
    spec_cmd->add_option("--n-trunc", n_trunc, "Fock-space truncation (a floor when certifying)");
    spec_cmd->add_option("--levels", levels, "Levels to report (default: all Lipkin levels, spin-boson 0..5)");
    spec_cmd->add_flag("--no-certify", no_certify, "Use --n-trunc as given");
    spec_cmd->add_option("-o,--output", spec_out, "CSV path (default: stdout)");
    spec_flow.attach(spec_cmd);
    spec_thr.attach(spec_cmd);

    // fig1
    auto* fig_cmd = app.add_subcommand("fig1", "Relative error of the Bessel-form eigenvalue against the flow");
    Fig1Options fig;
    std::string fig_levels = "10,15,20";
    std::string fig_grid = "0:5:26";
    std::string fig_out;
    std::optional<std::size_t> fig_trunc;
    FlowFlags fig_flow;
    ThresholdFlags fig_thr;
    fig_cmd->add_option("--lambda-over-omega", fig.lambda_over_omega, "lambda / omega")->capture_default_str();
    fig_cmd->add_option("--omega", fig.omega, "Boson frequency")->capture_default_str();
    fig_cmd->add_option("--levels", fig_levels, "Levels n")->capture_default_str();
    fig_cmd->add_option("--delta-grid", fig_grid, "Delta/omega values: a,b,c or start:stop:count")
        ->capture_default_str();
    fig_cmd->add_option("--n-trunc", fig_trunc, "Truncation floor");
    fig_cmd->add_option("-o,--output", fig_out, "CSV path (default: stdout)");
    fig_flow.attach(fig_cmd);
    fig_thr.attach(fig_cmd);

    // compare-generators
    auto* cmp_cmd = app.add_subcommand("compare-generators",
                                       "Band occupancy along Mielke and Wegner flows of a tridiagonal matrix");
    std::string cmp_matrix;
    std::string cmp_grid;
    std::string cmp_out;
    cmp_cmd->add_option("--matrix", cmp_matrix, "Tridiagonal matrix file (default: diag 1,2,3, off 1,1)");
    cmp_cmd->add_option("--scaled-ells", cmp_grid,
                        "Flow times s; Mielke runs to s/|H|, Wegner to s/|H|^2 (Frobenius norm)");
    cmp_cmd->add_option("-o,--output", cmp_out, "CSV path (default: stdout)");

    const std::vector<std::string> expanded = expand_key_values(raw_args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitConverged : kExitInputError;
    }

    try {
        if (*flow_cmd) {
            const BandedSymmetricMatrix h = load_matrix(matrix_path);
            FlowConfig cfg = flow_flags.config();
            cfg.generator = parse_generator(generator);
            TraceMode mode;
            if (trace_mode == "steps") {
                mode = TraceMode::Steps;
                cfg.record_steps = true;
            } else if (trace_mode == "snapshots") {
                mode = TraceMode::Snapshots;
                if (snapshot_list.empty()) throw InputError("--trace-mode snapshots needs --snapshots");
                cfg.snapshot_ells = parse_grid(snapshot_list);
            } else {
                throw InputError("--trace-mode must be steps or snapshots");
            }
            FlowResult result;
            try {
                result = integrate_flow(h, cfg);
            } catch (const FlowError& e) {
                err << "flow failed at ell = " << format_double(e.ell()) << ": " << e.what() << '\n';
                return kExitNotConverged;
            }
            Sink trace(trace_path, out);
            write_flow_trace(trace.get(), result, mode);
            write_flow_summary(trace.is_file() ? out : err, result);
            return result.converged ? kExitConverged : kExitNotConverged;
        }
        if (*spec_cmd) {
            SpectrumOptions opt;
            if (model == "lipkin") {
                opt.model = ModelKind::Lipkin;
            } else if (model == "spinboson") {
                opt.model = ModelKind::SpinBoson;
            } else {
                throw InputError("model must be lipkin or spinboson, got '" + model + "'");
            }
            opt.lipkin = lip;
            sb.branch = parse_branch(branch);
            sb.n_trunc = n_trunc.value_or(2);
            if (no_certify && !n_trunc) throw InputError("--no-certify needs --n-trunc");
            opt.spinboson = sb;
            opt.certify = !no_certify;
            if (!levels.empty()) opt.levels = parse_levels(levels);
            opt.flow = spec_flow.config();
            opt.thresholds = spec_thr.t;
            const SpectrumReport report = run_spectrum(opt);
            Sink sink(spec_out, out);
            write_spectrum_csv(sink.get(), report);
            if (opt.model == ModelKind::SpinBoson) err << "n_trunc: " << report.n_trunc << '\n';
            if (!report.converged) err << "warning: flow did not converge; raise --ell-max\n";
            return report.converged ? kExitConverged : kExitNotConverged;
        }
        if (*fig_cmd) {
            fig.n_list = parse_levels(fig_levels);
            fig.delta_over_omega = parse_grid(fig_grid);
            fig.n_trunc = fig_trunc;
            fig.flow = fig_flow.config();
            fig.thresholds = fig_thr.t;
            const Fig1Report report = run_fig1(fig);
            Sink sink(fig_out, out);
            write_fig1_csv(sink.get(), report);
            if (!report.converged) err << "warning: some flows did not converge; raise --ell-max\n";
            return report.converged ? kExitConverged : kExitNotConverged;
        }
        if (*cmp_cmd) {
            CompareOptions opt;
            if (!cmp_matrix.empty()) opt.matrix = load_matrix(cmp_matrix);
            if (!cmp_grid.empty()) opt.scaled_ells = parse_grid(cmp_grid);
            const CompareReport report = run_compare_generators(opt);
            Sink sink(cmp_out, out);
            write_compare_csv(sink.get(), report);
            std::ostream& info = sink.is_file() ? out : err;
            auto print = [&](const char* name, const std::vector<double>& v) {
                info << name << ':';
                for (double d : v) info << ' ' << format_double(d);
                info << '\n';
            };
            print("mielke_final", report.mielke_final_diagonal);
            print("wegner_final", report.wegner_final_diagonal);
            print("oracle", report.oracle_eigenvalues);
            return kExitConverged;
        }
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitTruncationError;
    } catch (const FlowError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

} // namespace bandflow::cli
