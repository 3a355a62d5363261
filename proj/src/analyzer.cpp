#include "infprod/analyzer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "infprod/errors.hpp"

namespace infprod {

namespace {

constexpr double kRateSlack = 1e-12;
// Longest oscillation period looked for in streamed sequences.
constexpr std::size_t kMaxDetectedPeriod = 16;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_conforming(std::span<const BlockUpperTriangular> list, const char* what) {
    if (list.empty()) throw std::invalid_argument(std::string(what) + " must be nonempty");
    for (const auto& a : list)
        if (!a.conforms_to(list.front()))
            throw ShapeError(std::string(what) + ": members have different block shapes");
}

std::vector<ComplexMatrix> c_blocks(std::span<const BlockUpperTriangular> list) {
    std::vector<ComplexMatrix> out;
    out.reserve(list.size());
    for (const auto& a : list) out.push_back(a.c());
    return out;
}

void check_declared(std::span<const BlockUpperTriangular> list,
                    const ContractionCertificate& cert) {
    if (!cert.one_step())
        throw InvalidCertificateError("declared certificate must bound each factor directly");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const double value = norm_value(list[i].c(), cert.norm());
        if (value > cert.rate() + kRateSlack)
            throw CertificateViolatedError("factor " + std::to_string(i + 1) + ": ||C|| = " +
                                               fmt(value) + " exceeds declared rate " +
                                               fmt(cert.rate()) + " in the " +
                                               cert.norm().name() + " norm",
                                           i + 1);
    }
}

ComplexMatrix limit_candidate(const BlockUpperTriangular& a) {
    return solve_right(a.b(), identity_minus(a.c()));
}

// Detects a sequence of matrices that keeps cycling with period p >= 2:
// ||M_n - M_{n-p}|| < eps while the last p values are not all within 100 eps
// of M_n, for `persistence` consecutive indices.
class OscillationDetector {
public:
    OscillationDetector(double eps, std::size_t persistence)
        : eps_(eps), persistence_(persistence), runs_(kMaxDetectedPeriod + 1, 0) {}

    std::optional<std::size_t> push(const ComplexMatrix& m) {
        history_.push_front(m);
        if (history_.size() > kMaxDetectedPeriod + 1) history_.pop_back();
        if (history_.size() < 2) return std::nullopt;
        double spread = 0.0;
        for (std::size_t p = 2; p <= kMaxDetectedPeriod && p < history_.size(); ++p) {
            spread = std::max(spread, frobenius_distance(history_[0], history_[p - 1]));
            const bool moving = spread > 100.0 * eps_;
            const bool repeats = frobenius_distance(history_[0], history_[p]) < eps_;
            runs_[p] = (moving && repeats) ? runs_[p] + 1 : 0;
            if (runs_[p] >= std::max(persistence_, 2 * p)) return p;
        }
        return std::nullopt;
    }

    /// The last p values, oldest first.
    std::vector<ComplexMatrix> cycle(std::size_t p) const {
        std::vector<ComplexMatrix> out(history_.begin(), history_.begin() + p);
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    double eps_;
    std::size_t persistence_;
    std::vector<std::size_t> runs_;
    std::deque<ComplexMatrix> history_;
};

std::string describe_cycle(const char* what, std::size_t n, std::size_t p) {
    return std::string(what) + " cycles with period " + std::to_string(p) + " through distinct " +
           "values (detected at n = " + std::to_string(n) + ")";
}

AnalysisReport analyze_periodic(const SequencePresentation& seq, const AnalyzerConfig& cfg) {
    const auto cycle = seq.members();
    AnalysisReport report;

    std::optional<ContractionCertificate> cert;
    if (seq.declared()) {
        check_declared(cycle, *seq.declared());
        cert = seq.declared();
    } else {
        const auto cs = c_blocks(cycle);
        cert = common_certificate(cs);
    }

    if (cert) {
        report.certificate = cert;
        std::vector<ComplexMatrix> candidates;
        for (const auto& a : cycle) candidates.push_back(limit_candidate(a));
        double spread = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            for (std::size_t j = i + 1; j < candidates.size(); ++j)
                spread = std::max(spread, frobenius_distance(candidates[i], candidates[j]));
        if (spread <= cfg.eps) {
            report.verdict = Verdict::CertifiedConverged;
            report.limit = limit_matrix(candidates.front());
            report.witness = "all cycle members share B (I - C)^{-1} (spread " + fmt(spread) + ")";
            return report;
        }
        report.verdict = Verdict::CertifiedDiverged;
        report.accumulation = periodic_accumulation(cycle, cfg);
        report.witness = "limit candidates B (I - C)^{-1} differ across the cycle (spread " +
                         fmt(spread) + "); phase subsequences have distinct limits";
        return report;
    }

    // No common norm: certify the period product instead.
    ComplexMatrix period_c = cycle.front().c();
    for (std::size_t i = 1; i < cycle.size(); ++i) period_c = matmul(period_c, cycle[i].c());
    auto period_cert = spectral_certificate(period_c, cfg.k_max);
    if (!period_cert)
        throw AnalysisRefusedError(
            "no norm contracts the cycle and rho(C_1 ... C_p) < 1 could not be certified");
    report.certificate = period_cert;
    auto acc = periodic_accumulation(cycle, cfg);
    if (acc.separation <= cfg.eps) {
        report.verdict = Verdict::CertifiedConverged;
        report.limit = limit_matrix(acc.points.front());
        report.witness = "all phase subsequences share one limit (certificate is for the period "
                         "product C_1 ... C_p)";
        return report;
    }
    report.verdict = Verdict::CertifiedDiverged;
    report.accumulation = std::move(acc);
    report.witness = "phase subsequences have distinct limits (certificate is for the period "
                     "product C_1 ... C_p)";
    return report;
}

AnalysisReport analyze_finite(const SequencePresentation& seq, const AnalyzerConfig& cfg) {
    const auto list = seq.members();
    const auto& last = list.back();
    AnalysisReport report;
    if (seq.declared()) {
        check_declared(list, *seq.declared());
        report.certificate = seq.declared();
    } else {
        report.certificate = spectral_certificate(last.c(), cfg.k_max);
        if (!report.certificate)
            throw AnalysisRefusedError("rho(C) < 1 could not be certified for the repeated factor");
    }
    report.verdict = Verdict::CertifiedConverged;
    report.limit = limit_matrix(limit_candidate(last));
    report.witness = "eventually constant: limit is B (I - C)^{-1} of the repeated factor";
    return report;
}

AnalysisReport analyze_stream(const SequencePresentation& seq, const AnalyzerConfig& cfg) {
    if (!seq.declared())
        throw AnalysisRefusedError("streamed sequences need a declared uniform contraction bound");
    const auto& cert = *seq.declared();
    AnalysisReport report;
    report.certificate = cert;

    ProductState state = ProductState::initial(seq.s(), seq.tail());
    OscillationDetector oscillation(cfg.eps, cfg.window);
    std::size_t quiet = 0;
    for (std::size_t n = 1; n <= cfg.horizon; ++n) {
        state = step(state, seq.factor(n), cert);
        report.steps = n;
        if (report.trace.size() < cfg.trace_limit) report.trace.push_back(trace_row(state, cert));

        // y_prev at n = 1 is L_1 - 0, not an increment.
        quiet = (n > 1 && state.norm_y < cfg.eps) ? quiet + 1 : 0;
        if (quiet >= cfg.window) {
            report.verdict = Verdict::ConvergedNumerically;
            report.limit = limit_matrix(state.l);
            report.deviation_bound = state.bound;
            report.witness = "||Y_n|| < eps for " + std::to_string(cfg.window) +
                             " consecutive steps (n = " + std::to_string(n) + ")";
            return report;
        }
        if (norm_value(state.l, NormKind::frobenius()) > 1.0 / cfg.eps) {
            report.verdict = Verdict::DivergedNumerically;
            report.witness = "L_n left the ball of radius 1/eps at n = " + std::to_string(n);
            return report;
        }
        if (auto p = oscillation.push(state.l)) {
            report.verdict = Verdict::DivergedNumerically;
            AccumulationWitness acc;
            acc.period = *p;
            acc.points = oscillation.cycle(*p);
            report.accumulation = std::move(acc);
            report.witness = describe_cycle("L_n", n, *p);
            return report;
        }
    }
    report.verdict = Verdict::Inconclusive;
    report.deviation_bound = state.bound;
    report.witness = "horizon reached without a decision";
    return report;
}

}  // namespace

SequencePresentation SequencePresentation::periodic(std::vector<BlockUpperTriangular> cycle) {
    require_conforming(cycle, "periodic cycle");
    SequencePresentation out(PresentationKind::Periodic, cycle.front().s(), cycle.front().tail());
    out.members_ = std::move(cycle);
    return out;
}

SequencePresentation SequencePresentation::finite(std::vector<BlockUpperTriangular> list) {
    require_conforming(list, "finite list");
    SequencePresentation out(PresentationKind::Finite, list.front().s(), list.front().tail());
    out.members_ = std::move(list);
    return out;
}

SequencePresentation SequencePresentation::stream(std::size_t s, std::size_t tail,
                                                  Generator generator) {
    if (s == 0 || tail == 0) throw ShapeError("stream block sizes must be positive");
    if (!generator) throw std::invalid_argument("stream needs a generator");
    SequencePresentation out(PresentationKind::Stream, s, tail);
    out.generator_ = std::move(generator);
    return out;
}

SequencePresentation& SequencePresentation::declare(ContractionCertificate cert) {
    declared_ = std::move(cert);
    return *this;
}

BlockUpperTriangular SequencePresentation::factor(std::size_t n) const {
    if (n == 0) throw std::out_of_range("factors are 1-based");
    switch (kind_) {
        case PresentationKind::Periodic: return members_[(n - 1) % members_.size()];
        case PresentationKind::Finite: return members_[std::min(n, members_.size()) - 1];
        case PresentationKind::Stream: {
            BlockUpperTriangular a = generator_(n);
            if (a.s() != s_ || a.tail() != tail_)
                throw ShapeError("stream factor " + std::to_string(n) + " has the wrong shape");
            return a;
        }
    }
    throw std::logic_error("unknown presentation kind");
}

void AnalyzerConfig::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (horizon == 0 || window == 0 || k_max == 0)
        throw std::invalid_argument("horizon, window and k_max must be positive");
    if (window > horizon) throw std::invalid_argument("window must not exceed horizon");
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedConverged: return "CertifiedConverged";
        case Verdict::CertifiedDiverged: return "CertifiedDiverged";
        case Verdict::ConvergedNumerically: return "ConvergedNumerically";
        case Verdict::DivergedNumerically: return "DivergedNumerically";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

ComplexMatrix limit_matrix(const ComplexMatrix& l) {
    const std::size_t s = l.rows();
    ComplexMatrix out(s + l.cols(), s + l.cols());
    for (std::size_t i = 0; i < s; ++i) out(i, i) = 1.0;
    out.set_block(0, s, l);
    return out;
}

std::optional<ContractionCertificate> common_certificate(std::span<const ComplexMatrix> cs) {
    if (cs.empty()) throw std::invalid_argument("common_certificate needs at least one matrix");
    for (NormTag tag : kBuiltinNorms) {
        const NormKind norm = builtin_norm(tag);
        double worst = 0.0;
        for (const auto& c : cs) worst = std::max(worst, norm_value(c, norm));
        if (worst < 1.0) return ContractionCertificate(norm, worst, CertificateKind::GelfandPower, 1);
    }

    auto rate_in = [&](const NormKind& norm) {
        double worst = 0.0;
        for (const auto& c : cs) worst = std::max(worst, norm_value(c, norm));
        return worst;
    };
    try {
        NormKind norm = common_lyapunov_scaling(cs);
        const double rate = rate_in(norm);
        return ContractionCertificate(std::move(norm), rate, CertificateKind::Lyapunov);
    } catch (const NoContractingNormError&) {
    }

    std::optional<ContractionCertificate> best;
    for (const auto& c : cs) {
        try {
            NormKind norm = lyapunov_scaling(c);
            const double rate = rate_in(norm);
            if (rate < 1.0 && (!best || rate < best->rate()))
                best = ContractionCertificate(std::move(norm), rate, CertificateKind::Lyapunov);
        } catch (const NoContractingNormError&) {
        }
    }
    return best;
}

AccumulationWitness periodic_accumulation(std::span<const BlockUpperTriangular> cycle,
                                          const AnalyzerConfig& cfg) {
    require_conforming(cycle, "periodic cycle");
    const std::size_t p = cycle.size();
    AccumulationWitness out;
    out.period = p;
    for (std::size_t j = 0; j < p; ++j) {
        // Factors A_{j+1} ... A_{j+p}, which carry X_{kp+j} to X_{(k+1)p+j}.
        BlockUpperTriangular q = cycle[j];
        for (std::size_t k = 1; k < p; ++k) q = block_mul(q, cycle[(j + k) % p]);
        out.points.push_back(limit_candidate(q));
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) {
            const double sep = frobenius_distance(out.points[a], out.points[b]);
            if (sep > out.separation) {
                out.separation = sep;
                out.phase_a = a;
                out.phase_b = b;
            }
        }

    // Confirm by iterating X_n = B_n + X_{n-1} C_n.
    const double tol = 100.0 * cfg.eps;
    ComplexMatrix x(cycle.front().s(), cycle.front().tail());
    std::vector<bool> close(p, false);
    for (std::size_t n = 1; n <= cfg.horizon; ++n) {
        const auto& a = cycle[(n - 1) % p];
        x = a.b() + matmul(x, a.c());
        close[n % p] = frobenius_distance(x, out.points[n % p]) <= tol;
        if (n >= p && std::all_of(close.begin(), close.end(), [](bool v) { return v; })) {
            out.confirmed_at = n;
            break;
        }
    }
    return out;
}

AnalysisReport analyze(const SequencePresentation& seq, const AnalyzerConfig& cfg) {
    cfg.validate();
    switch (seq.kind()) {
        case PresentationKind::Periodic: return analyze_periodic(seq, cfg);
        case PresentationKind::Finite: return analyze_finite(seq, cfg);
        case PresentationKind::Stream: return analyze_stream(seq, cfg);
    }
    throw std::logic_error("unknown presentation kind");
}

AnalysisReport corollary1_analyze(const SequencePresentation& seq, const ComplexMatrix& limit_c,
                                  const AnalyzerConfig& cfg) {
    cfg.validate();
    if (!limit_c.is_square() || limit_c.rows() != seq.tail())
        throw ShapeError("limit C does not match the sequence's C-blocks");

    auto cert = spectral_certificate(limit_c, cfg.k_max);
    if (!cert) throw AnalysisRefusedError("rho(C) < 1 could not be certified for the limit C");
    if (!cert->one_step()) {
        try {
            NormKind norm = lyapunov_scaling(limit_c);
            const double rate = norm_value(limit_c, norm);
            cert = ContractionCertificate(std::move(norm), rate, CertificateKind::Lyapunov);
        } catch (const NoContractingNormError&) {
            // keep the Gelfand certificate; rho(C) < 1 is still established
        }
    }

    AnalysisReport report;
    report.certificate = cert;
    const ComplexMatrix resolvent_base = identity_minus(limit_c);
    auto limit_for = [&](const ComplexMatrix& b) {
        return limit_matrix(solve_right(b, resolvent_base));
    };

    if (seq.kind() != PresentationKind::Stream) {
        const auto list = seq.members();
        const std::size_t first_tail_index =
            seq.kind() == PresentationKind::Periodic ? 0 : list.size() - 1;
        for (std::size_t i = first_tail_index; i < list.size(); ++i)
            if (frobenius_distance(list[i].c(), limit_c) > cfg.eps)
                throw std::invalid_argument("C-blocks do not converge to the supplied limit C");

        if (seq.kind() == PresentationKind::Finite) {
            report.verdict = Verdict::CertifiedConverged;
            report.limit = limit_for(list.back().b());
            report.witness = "B_n is eventually constant";
            return report;
        }
        double spread = 0.0;
        for (std::size_t i = 1; i < list.size(); ++i)
            spread = std::max(spread, frobenius_distance(list[i].b(), list[0].b()));
        if (spread <= cfg.eps) {
            report.verdict = Verdict::CertifiedConverged;
            report.limit = limit_for(list.front().b());
            report.witness = "B_n is constant";
            return report;
        }
        report.verdict = Verdict::CertifiedDiverged;
        report.accumulation = periodic_accumulation(list, cfg);
        report.witness = "B_n cycles through distinct values (spread " + fmt(spread) + ")";
        return report;
    }

    OscillationDetector oscillation(cfg.eps, cfg.window);
    std::optional<ComplexMatrix> previous;
    std::size_t quiet = 0;
    for (std::size_t n = 1; n <= cfg.horizon; ++n) {
        const BlockUpperTriangular a = seq.factor(n);
        report.steps = n;
        if (previous) quiet = frobenius_distance(a.b(), *previous) < cfg.eps ? quiet + 1 : 0;
        previous = a.b();
        if (quiet >= cfg.window) {
            report.verdict = Verdict::ConvergedNumerically;
            report.limit = limit_for(a.b());
            report.witness = "B_n Cauchy within eps for " + std::to_string(cfg.window) +
                             " consecutive steps (n = " + std::to_string(n) + ")";
            return report;
        }
        if (norm_value(a.b(), NormKind::frobenius()) > 1.0 / cfg.eps) {
            report.verdict = Verdict::DivergedNumerically;
            report.witness = "B_n left the ball of radius 1/eps at n = " + std::to_string(n);
            return report;
        }
        if (auto p = oscillation.push(a.b())) {
            report.verdict = Verdict::DivergedNumerically;
            AccumulationWitness acc;
            acc.period = *p;
            acc.points = oscillation.cycle(*p);
            report.accumulation = std::move(acc);
            report.witness = describe_cycle("B_n", n, *p);
            return report;
        }
    }
    report.verdict = Verdict::Inconclusive;
    report.witness = "horizon reached without a decision";
    return report;
}

RcpVerdict certify_rcp(std::span<const BlockUpperTriangular> sigma, double atol,
                       const std::optional<ContractionCertificate>& declared) {
    require_conforming(sigma, "matrix set");
    if (!(atol >= 0.0)) throw std::invalid_argument("atol must be nonnegative");

    std::optional<ContractionCertificate> cert;
    if (declared) {
        check_declared(sigma, *declared);
        cert = declared;
    } else {
        const auto cs = c_blocks(sigma);
        cert = common_certificate(cs);
    }
    if (!cert)
        throw AnalysisRefusedError("no single norm found in which every C-block contracts");

    RcpVerdict out{false, *cert, {}, 0.0, std::nullopt, std::nullopt, std::nullopt};
    for (const auto& a : sigma) out.candidates.push_back(limit_candidate(a));

    std::pair<std::size_t, std::size_t> worst{0, 0};
    for (std::size_t i = 0; i < sigma.size(); ++i)
        for (std::size_t j = i + 1; j < sigma.size(); ++j) {
            const double gap = frobenius_distance(out.candidates[i], out.candidates[j]);
            if (gap > out.max_discrepancy) {
                out.max_discrepancy = gap;
                worst = {i, j};
            }
        }

    if (out.max_discrepancy <= atol) {
        out.is_rcp = true;
        out.limit = limit_matrix(out.candidates.front());
        return out;
    }
    out.violating_pair = worst;
    const BlockUpperTriangular pair[] = {sigma[worst.first], sigma[worst.second]};
    out.witness = periodic_accumulation(pair);
    return out;
}

}  // namespace infprod
