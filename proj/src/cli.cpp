#include "infprod/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "infprod/analyzer.hpp"
#include "infprod/errors.hpp"
#include "infprod/sequence_file.hpp"

namespace infprod::cli {

namespace {

constexpr double kDenseCheckTol = 1e-11;

struct Options {
    std::string input;
    std::size_t n = 1;
    std::string trace;
    AnalyzerConfig analyzer;
    double atol = kDefaultRcpTolerance;
    std::string kind = "auto";
};

void print_certificate(std::ostream& os, const ContractionCertificate& cert) {
    os << "certificate: " << cert.describe() << "\n";
    if (cert.norm().is_lyapunov())
        os << "certificate_weight: " << format_matrix(cert.norm().weight()) << "\n";
}

void print_accumulation(std::ostream& os, const AccumulationWitness& acc) {
    os << "period: " << acc.period << "\n";
    for (std::size_t j = 0; j < acc.points.size(); ++j)
        os << "accumulation_point[" << j << "]: " << format_matrix(acc.points[j]) << "\n";
    if (acc.points.size() > 1 && acc.separation > 0.0)
        os << "separated_phases: " << acc.phase_a << " " << acc.phase_b << "\n"
           << "separation: " << format_real(acc.separation) << "\n";
    if (acc.confirmed_at) os << "confirmed_at: " << *acc.confirmed_at << "\n";
}

std::vector<BlockUpperTriangular> require_sequence(const SequenceFile& file, const char* command) {
    if (file.kind != FileKind::Periodic && file.kind != FileKind::Finite)
        throw ParseError(std::string(command) + " needs kind periodic or finite, got " +
                         to_string(file.kind));
    return file.matrices;
}

int cmd_product(const Options& opt, std::ostream& out) {
    const SequenceFile file = load_sequence_file(opt.input);
    require_sequence(file, "product");
    if (opt.n == 0) throw ParseError("--n must be at least 1");
    const SequencePresentation seq = file.presentation();

    std::optional<ContractionCertificate> cert = seq.declared();
    if (!cert) {
        std::vector<ComplexMatrix> cs;
        for (const auto& a : file.matrices) cs.push_back(a.c());
        cert = common_certificate(cs);
        if (!cert)
            throw AnalysisRefusedError("no single norm contracts every C-block; "
                                       "declare one with \"norm\" and \"rate\"");
    }

    std::vector<BlockUpperTriangular> factors;
    factors.reserve(opt.n);
    std::ostringstream trace;
    trace << kTraceHeader << "\n";
    ProductState state = ProductState::initial(file.s, file.d - file.s);
    for (std::size_t k = 1; k <= opt.n; ++k) {
        factors.push_back(seq.factor(k));
        state = step(state, factors.back(), *cert);
        trace << format_trace_row(trace_row(state, *cert)) << "\n";
    }

    const ComplexMatrix structured = to_dense(BlockUpperTriangular(file.s, state.x, state.gamma));
    const ComplexMatrix dense = dense_partial_product(factors, opt.n);
    const double scale = 1.0 + norm_value(dense, NormKind::frobenius());
    if (frobenius_distance(structured, dense) > kDenseCheckTol * scale)
        throw Error("structured product disagrees with dense multiplication");

    if (!opt.trace.empty()) {
        std::ofstream csv(opt.trace);
        if (!csv) throw Error("cannot write trace file " + opt.trace);
        csv << trace.str();
    }

    out << "n: " << opt.n << "\n"
        << "s: " << file.s << "\n"
        << "d: " << file.d << "\n"
        << "X: " << format_matrix(state.x) << "\n"
        << "Gamma: " << format_matrix(state.gamma) << "\n"
        << "P: " << format_matrix(structured) << "\n"
        << "L: " << format_matrix(state.l) << "\n"
        << "D: " << format_matrix(state.d_dev) << "\n"
        << "bound: " << format_real(state.bound) << "\n";
    print_certificate(out, *cert);
    out << "dense_check: ok\n";
    return kOk;
}

int cmd_analyze(const Options& opt, std::ostream& out) {
    const SequenceFile file = load_sequence_file(opt.input);
    require_sequence(file, "analyze");
    try {
        opt.analyzer.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    const AnalysisReport report = analyze(file.presentation(), opt.analyzer);

    out << "verdict: " << to_string(report.verdict) << "\n";
    if (report.certificate) print_certificate(out, *report.certificate);
    if (report.limit) out << "limit: " << format_matrix(*report.limit) << "\n";
    if (report.deviation_bound)
        out << "deviation_bound: " << format_real(*report.deviation_bound) << "\n";
    out << "witness: " << report.witness << "\n";
    if (report.accumulation) print_accumulation(out, *report.accumulation);
    return kOk;
}

int cmd_certify_rcp(const Options& opt, std::ostream& out) {
    const SequenceFile file = load_sequence_file(opt.input);
    if (file.kind != FileKind::Set)
        throw ParseError("certify-rcp needs kind set, got " + to_string(file.kind));
    const RcpVerdict verdict = certify_rcp(file.matrices, opt.atol, file.declared_certificate());

    out << (verdict.is_rcp ? "RCP" : "NOT_RCP") << "\n";
    print_certificate(out, verdict.certificate);
    out << "max_discrepancy: " << format_real(verdict.max_discrepancy) << "\n";
    if (verdict.is_rcp) {
        out << "limit: " << format_matrix(*verdict.limit) << "\n";
        return kOk;
    }
    const auto [i, j] = *verdict.violating_pair;
    out << "violating_pair: " << i << " " << j << "\n"
        << "L[" << i << "]: " << format_matrix(verdict.candidates[i]) << "\n"
        << "L[" << j << "]: " << format_matrix(verdict.candidates[j]) << "\n";
    print_accumulation(out, *verdict.witness);
    return kNotRcp;
}

int cmd_norm(const Options& opt, std::ostream& out, std::ostream& err) {
    const SequenceFile file = load_sequence_file(opt.input);
    if (file.kind != FileKind::Matrix)
        throw ParseError("norm needs kind matrix, got " + to_string(file.kind));
    const ComplexMatrix& c = *file.matrix;

    if (opt.kind == "one" || opt.kind == "inf" || opt.kind == "fro") {
        const NormKind norm = opt.kind == "one"   ? NormKind::one()
                              : opt.kind == "inf" ? NormKind::inf()
                                                  : NormKind::frobenius();
        const double value = norm_value(c, norm);
        if (!(value < 1.0)) {
            err << "undecided: " << opt.kind << " norm is " << format_real(value)
                << " (>= 1 does not imply rho(C) >= 1)\n";
            return kUndecided;
        }
        out << "norm: " << opt.kind << "\n" << "value: " << format_real(value) << "\n";
        return kOk;
    }

    std::ostringstream body;
    if (opt.kind == "auto") {
        const auto cert = spectral_certificate(c, opt.analyzer.k_max);
        if (!cert) {
            err << "undecided: no certificate within " << opt.analyzer.k_max
                << " Gelfand powers and no Lyapunov scaling (rho(C) >= 1 suspected, not proven)\n";
            return kUndecided;
        }
        body << "certificate: " << cert->describe() << "\n";
    }
    try {
        const NormKind scaled = lyapunov_scaling(c);
        body << "lyapunov_weight: " << format_matrix(scaled.weight()) << "\n"
             << "lyapunov_norm: " << format_real(norm_value(c, scaled)) << "\n";
    } catch (const NoContractingNormError& e) {
        if (opt.kind == "lyapunov") {
            err << "undecided: " << e.what() << "\n";
            return kUndecided;
        }
        body << "lyapunov_weight: none (" << e.what() << ")\n";
    }
    out << body.str();
    return kOk;
}

}  // namespace

std::string format_real(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_matrix(const ComplexMatrix& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ", ";
            const Complex z = m(i, j);
            if (z.imag() == 0.0)
                out += format_real(z.real());
            else
                out += "[" + format_real(z.real()) + ", " + format_real(z.imag()) + "]";
        }
        out += "]";
    }
    return out + "]";
}

std::string format_trace_row(const TraceRow& row) {
    return std::to_string(row.n) + "," + format_real(row.norm_x) + "," + format_real(row.norm_y) +
           "," + format_real(row.norm_d) + "," + format_real(row.bound) + "," +
           format_real(row.norm_gamma);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Convergence analysis of infinite products of [[I, B], [0, C]] matrices",
                 "infprod"};
    app.require_subcommand(1);
    Options opt;

    auto* product = app.add_subcommand("product", "Compute the partial product P_n");
    product->add_option("--input", opt.input, "Sequence file")->required();
    product->add_option("--n", opt.n, "Number of factors")->required();
    product->add_option("--trace", opt.trace, "Write per-step CSV trace here");

    auto* analyze_cmd = app.add_subcommand("analyze", "Decide convergence of the right product");
    analyze_cmd->add_option("--input", opt.input, "Sequence file")->required();
    analyze_cmd->add_option("--eps", opt.analyzer.eps, "Cauchy / equality tolerance");
    analyze_cmd->add_option("--horizon", opt.analyzer.horizon, "Maximum number of steps");
    analyze_cmd->add_option("--window", opt.analyzer.window, "Consecutive small increments");

    auto* rcp = app.add_subcommand("certify-rcp", "Decide the RCP property of a finite set");
    rcp->add_option("--input", opt.input, "Set file")->required();
    rcp->add_option("--atol", opt.atol, "Tolerance for equal limit candidates");

    auto* norm = app.add_subcommand("norm", "Certify that a square matrix has spectral radius < 1");
    norm->add_option("--input", opt.input, "Matrix file")->required();
    norm->add_option("--kind", opt.kind, "auto, lyapunov, one, inf or fro")
        ->check(CLI::IsMember({"auto", "lyapunov", "one", "inf", "fro"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    std::ostringstream buffer;
    try {
        int code = kOk;
        if (*product) code = cmd_product(opt, buffer);
        else if (*analyze_cmd) code = cmd_analyze(opt, buffer);
        else if (*rcp) code = cmd_certify_rcp(opt, buffer);
        else code = cmd_norm(opt, buffer, err);
        out << buffer.str();
        return code;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const CertificateViolatedError& e) {
        err << "certificate violated: " << e.what() << "\n";
        return kRefused;
    } catch (const InvalidCertificateError& e) {
        err << "invalid certificate: " << e.what() << "\n";
        return kRefused;
    } catch (const AnalysisRefusedError& e) {
        err << "analysis refused: " << e.what() << "\n";
        return kRefused;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace infprod::cli
