#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "infprod/matrix.hpp"

namespace infprod {

enum class NormTag { One, Inf, Frobenius, LyapunovScaled };

/// A submultiplicative matrix norm.
///
/// The Lyapunov-scaled variant is the operator norm induced by the vector
/// norm |x|_P = sqrt(x* P x) for a Hermitian positive definite weight P. The
/// weight is validated (square, Hermitian, Cholesky succeeds) on construction
/// and its Cholesky factor is kept alongside it.
class NormKind {
public:
    static NormKind one() { return NormKind(NormTag::One); }
    static NormKind inf() { return NormKind(NormTag::Inf); }
    static NormKind frobenius() { return NormKind(NormTag::Frobenius); }
    static NormKind lyapunov(ComplexMatrix weight);

    NormTag tag() const noexcept { return tag_; }
    bool is_lyapunov() const noexcept { return tag_ == NormTag::LyapunovScaled; }

    /// The weight P. Throws std::logic_error for the built-in norms.
    const ComplexMatrix& weight() const;
    /// Lower-triangular L with P = L L*.
    const ComplexMatrix& cholesky_factor() const;

    std::string name() const;

private:
    explicit NormKind(NormTag tag) : tag_(tag) {}

    NormTag tag_;
    std::optional<ComplexMatrix> weight_;
    std::optional<ComplexMatrix> chol_;
};

/// The three norms searched before a Lyapunov scaling is attempted, in
/// search order.
inline constexpr NormTag kBuiltinNorms[] = {NormTag::Inf, NormTag::One, NormTag::Frobenius};

NormKind builtin_norm(NormTag tag);

/// Value of `kind` at m. One/Inf/Frobenius accept any shape; the Lyapunov
/// norm needs a square m conforming to its weight (ShapeError otherwise).
double norm_value(const ComplexMatrix& m, const NormKind& kind);

/// Norm for the s x (d-s) row blocks (B, X, Y, D) that get multiplied on the
/// right by C-blocks, chosen so that row_block_norm(M C) <= row_block_norm(M)
/// * norm_value(C). Coincides with norm_value for One/Inf/Frobenius; for the
/// Lyapunov norm it is the operator norm from (C^{d-s}, |.|_P) into
/// (C^s, |.|_2), i.e. the spectral norm of M L^{-*}.
double row_block_norm(const ComplexMatrix& m, const NormKind& kind);

enum class CertificateKind { Declared, GelfandPower, Lyapunov };

/// Evidence that a norm and rate r < 1 dominate a C-block (or a set of them).
///
/// For GelfandPower(k) the certified statement is ||C^k|| <= rate^k; only
/// certificates with one_step() true bound ||C|| <= rate directly.
class ContractionCertificate {
public:
    /// Throws InvalidCertificateError unless 0 <= rate < 1 and power >= 1.
    ContractionCertificate(NormKind norm, double rate, CertificateKind kind,
                           std::size_t power = 1);

    static ContractionCertificate declared(NormKind norm, double rate) {
        return {std::move(norm), rate, CertificateKind::Declared};
    }

    const NormKind& norm() const noexcept { return norm_; }
    double rate() const noexcept { return rate_; }
    CertificateKind kind() const noexcept { return kind_; }
    std::size_t power() const noexcept { return power_; }
    bool one_step() const noexcept { return kind_ != CertificateKind::GelfandPower || power_ == 1; }

    std::string describe() const;

private:
    NormKind norm_;
    double rate_;
    CertificateKind kind_;
    std::size_t power_;
};

/// Solves the Stein equation P - C* P C = I by dense vectorization and returns
/// the induced Lyapunov-scaled norm, in which ||C|| = sqrt(1 - 1/lambda_max(P)) < 1.
///
/// Throws NoContractingNormError when the system is singular, P is not
/// positive definite, or the achieved norm is not below one.
NormKind lyapunov_scaling(const ComplexMatrix& c);

/// Common weight for a family: solves P - sum_i C_i* P C_i = I. A positive
/// definite solution gives P - C_i* P C_i >= I for each i, hence one norm in
/// which every C_i is a strict contraction. Same errors as lyapunov_scaling.
NormKind common_lyapunov_scaling(std::span<const ComplexMatrix> cs);

/// Residual ||P - sum_i C_i* P C_i - I||_F.
double stein_residual(const ComplexMatrix& weight, std::span<const ComplexMatrix> cs);

inline constexpr std::size_t kDefaultGelfandPowers = 64;

/// Certifies rho(c) < 1. Tries ||c^k|| < 1 for k = 1, 2, ..., k_max in the
/// built-in norms and returns GelfandPower(k) with rate ||c^k||^{1/k} at the
/// first success; otherwise falls back to lyapunov_scaling. std::nullopt
/// means undecided, not a proof that rho(c) >= 1.
std::optional<ContractionCertificate> spectral_certificate(
    const ComplexMatrix& c, std::size_t k_max = kDefaultGelfandPowers);

}  // namespace infprod
