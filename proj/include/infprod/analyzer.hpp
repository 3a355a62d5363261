#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infprod/block_form.hpp"
#include "infprod/norms.hpp"
#include "infprod/product_engine.hpp"

namespace infprod {

enum class PresentationKind { Periodic, Finite, Stream };

/// How a sequence (A_n), n = 1, 2, ... is given.
///
///   Periodic: A_n cycles through a nonempty list.
///   Finite:   A_n follows a list, then repeats its last element forever.
///   Stream:   A_n is produced on demand by a callback (1-based index).
///
/// All members share one block shape (s, d). An optional declared
/// certificate asserts ||C_n|| <= rate for every n in a fixed norm.
class SequencePresentation {
public:
    using Generator = std::function<BlockUpperTriangular(std::size_t)>;

    static SequencePresentation periodic(std::vector<BlockUpperTriangular> cycle);
    static SequencePresentation finite(std::vector<BlockUpperTriangular> list);
    static SequencePresentation stream(std::size_t s, std::size_t tail, Generator generator);

    SequencePresentation& declare(ContractionCertificate cert);

    PresentationKind kind() const noexcept { return kind_; }
    std::size_t s() const noexcept { return s_; }
    std::size_t tail() const noexcept { return tail_; }

    /// The stored list (cycle or eventually-constant list); empty for streams.
    std::span<const BlockUpperTriangular> members() const noexcept { return members_; }
    const std::optional<ContractionCertificate>& declared() const noexcept { return declared_; }

    /// A_n, 1-based. Stream factors are shape-checked on every call.
    BlockUpperTriangular factor(std::size_t n) const;

private:
    SequencePresentation(PresentationKind kind, std::size_t s, std::size_t tail)
        : kind_(kind), s_(s), tail_(tail) {}

    PresentationKind kind_;
    std::size_t s_;
    std::size_t tail_;
    std::vector<BlockUpperTriangular> members_;
    Generator generator_;
    std::optional<ContractionCertificate> declared_;
};

struct AnalyzerConfig {
    /// Cauchy tolerance for increments, and equality tolerance for limit candidates.
    double eps = 1e-10;
    std::size_t horizon = 10000;
    /// Consecutive small increments required before declaring convergence.
    std::size_t window = 20;
    std::size_t k_max = kDefaultGelfandPowers;
    /// Stream analyses keep at most this many trace rows.
    std::size_t trace_limit = 100000;

    /// Throws std::invalid_argument unless all fields are positive and
    /// window <= horizon.
    void validate() const;
};

enum class Verdict {
    CertifiedConverged,
    CertifiedDiverged,
    ConvergedNumerically,
    DivergedNumerically,
    Inconclusive,
};

std::string to_string(Verdict v);

/// Distinct limits of the phase subsequences X_{kp+j}, j = 0 .. p-1, of a
/// periodic right product. Each point is the fixed point of
/// X -> X_Q + X Gamma_Q, where [[I, X_Q], [0, Gamma_Q]] is the period product
/// starting after phase j.
struct AccumulationWitness {
    std::size_t period = 0;
    std::vector<ComplexMatrix> points;
    /// The two most separated phases.
    std::size_t phase_a = 0;
    std::size_t phase_b = 0;
    double separation = 0.0;
    /// First n at which iterating the product put every phase within
    /// 100 eps of its point; empty if the horizon ran out first.
    std::optional<std::size_t> confirmed_at;
};

struct AnalysisReport {
    Verdict verdict = Verdict::Inconclusive;
    /// lim P_n as a dense d x d matrix [[I, L], [0, 0]].
    std::optional<ComplexMatrix> limit;
    std::optional<ContractionCertificate> certificate;
    std::optional<AccumulationWitness> accumulation;
    /// Human-readable evidence for the verdict.
    std::string witness;
    /// Certified bound on ||X_n - L_n|| at the last step (streams only).
    std::optional<double> deviation_bound;
    std::size_t steps = 0;
    std::vector<TraceRow> trace;
};

/// Decides convergence of P_n = A_1 ... A_n.
///
/// Periodic: exact. Converges iff every cycle member has the same
/// L = B (I - C)^{-1} (within eps), given one norm contracting every member.
/// Without such a norm the decision falls back to the phase fixed points,
/// certified through rho(C_1 ... C_p) < 1.
/// Finite: converges to [[I, B_last (I - C_last)^{-1}], [0, 0]] once
/// rho(C_last) < 1 is certified.
/// Stream: runs the product engine to the horizon under the declared
/// certificate and reports a numerical verdict or Inconclusive.
///
/// Throws AnalysisRefusedError when no contraction certificate is
/// obtainable, and CertificateViolatedError when a declared one fails.
AnalysisReport analyze(const SequencePresentation& seq, const AnalyzerConfig& cfg = {});

/// Analysis for sequences whose C_n converge to a known C with rho(C) < 1:
/// P_n converges iff B_n does, with limit [[I, (lim B_n)(I - C)^{-1}], [0, 0]].
/// The reported certificate is a one-step norm for C (a Lyapunov scaling when
/// only higher Gelfand powers contract).
///
/// Throws AnalysisRefusedError when rho(C) < 1 cannot be certified, and
/// std::invalid_argument when a periodic/finite presentation's C-blocks do
/// not converge to `limit_c`.
AnalysisReport corollary1_analyze(const SequencePresentation& seq, const ComplexMatrix& limit_c,
                                  const AnalyzerConfig& cfg = {});

/// One norm in which every matrix of `cs` has norm <= rate < 1: a built-in
/// norm if one works, else a common Lyapunov scaling, else a single member's
/// Lyapunov scaling that happens to contract the others.
std::optional<ContractionCertificate> common_certificate(std::span<const ComplexMatrix> cs);

/// Phase fixed points of the periodic product cycling through `cycle`.
/// Needs rho(C_1 ... C_p) < 1.
AccumulationWitness periodic_accumulation(std::span<const BlockUpperTriangular> cycle,
                                          const AnalyzerConfig& cfg = {});

inline constexpr double kDefaultRcpTolerance = 1e-9;

struct RcpVerdict {
    bool is_rcp = false;
    ContractionCertificate certificate;
    /// L_i = B_i (I - C_i)^{-1} for every member, in input order.
    std::vector<ComplexMatrix> candidates;
    /// Largest pairwise ||L_i - L_j||_F.
    double max_discrepancy = 0.0;
    /// Common limit [[I, L], [0, 0]] of every right product (RCP only).
    std::optional<ComplexMatrix> limit;
    /// Most discrepant pair, lowest indices on ties (NOT_RCP only).
    std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
    /// Accumulation points of A_i A_j A_i A_j ... for the violating pair.
    std::optional<AccumulationWitness> witness;
};

/// A finite set of form-[[I, B], [0, C]] matrices with uniformly contracting
/// C-blocks has the RCP property iff all B_i (I - C_i)^{-1} coincide.
///
/// Uniform contraction is established by `declared` if given (and checked on
/// every member), else by common_certificate. Throws AnalysisRefusedError
/// when neither works and CertificateViolatedError when `declared` fails.
RcpVerdict certify_rcp(std::span<const BlockUpperTriangular> sigma,
                       double atol = kDefaultRcpTolerance,
                       const std::optional<ContractionCertificate>& declared = std::nullopt);

/// [[I_s, L], [0, 0]].
ComplexMatrix limit_matrix(const ComplexMatrix& l);

}  // namespace infprod
